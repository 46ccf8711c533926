//! Normal forms identify polytopes up to lattice automorphism.
use torifan::lattice::IntegerMatrix;
use torifan::polytope::normal_form;
use torifan::verify::data::weighted_projective_space;

fn main() -> torifan::Result<()> {
    let p = weighted_projective_space(&[1, 1, 1, 3]);
    let g = IntegerMatrix::from_i64(3, 3, &[1, 2, 0, 0, 1, 3, 0, 0, 1]);
    let q = p.base().transform(&g)?;
    let (a, b) = (normal_form(p.base()), normal_form(&q));
    println!("{:?}", a.matrix);
    println!("equal after transform: {}", a == b);
    Ok(())
}
