//! Reflexivity, dual and invariants of the anticanonical model of P(1,1,1,3).
use torifan::geometry::model_invariants;
use torifan::ReflexivePolytope;

fn main() -> torifan::Result<()> {
    let p = ReflexivePolytope::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -3]])?;
    println!("lattice points: {}", p.base().lattice_points().len());
    println!("dual vertices: {:?}", p.dual().vertices());
    println!("dual volume: {}", p.dual().normalized_volume());
    let inv = model_invariants(&p)?;
    println!(
        "rho = {}, fano index = {:?}, degree = {}",
        inv.picard_rank, inv.fano_index, inv.degree
    );
    Ok(())
}
