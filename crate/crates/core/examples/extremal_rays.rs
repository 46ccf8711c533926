//! Extremal rays of the Mori cone of the blowup of P3 at a fixed point.
use torifan::fan::star_subdivision;
use torifan::lattice::LatticeVector;
use torifan::mmp::{contract_fiber_type, extremal_rays, RayKind};
use torifan::verify::data::p3;

fn main() -> torifan::Result<()> {
    let x = star_subdivision(&p3(), &LatticeVector::from_i64(&[1, 1, 1]))?;
    for r in extremal_rays(&x)? {
        println!("{:?}: degree {}, walls {:?}", r.kind, r.degree, r.walls);
        if r.kind == RayKind::FiberType {
            let c = contract_fiber_type(&x, &r)?;
            println!("  base {:?} with rays {:?}", c.base, c.base_fan.rays);
        }
    }
    Ok(())
}
