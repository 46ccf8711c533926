//! Toric MMP of a smooth almost Fano threefold with pseudo-index above one.
use torifan::fan::star_subdivision;
use torifan::lattice::LatticeVector;
use torifan::mmp::{structure_pipeline, StepKind};
use torifan::verify::data::p1_cubed;

fn main() -> torifan::Result<()> {
    let x = star_subdivision(&p1_cubed(), &LatticeVector::from_i64(&[1, 1, 1]))?;
    let r = structure_pipeline(&x)?;
    for s in &r.steps {
        match &s.kind {
            StepKind::Flop { walls } => println!("flop {walls:?}"),
            StepKind::Blowdown { ray } => println!("blow down ray {ray}"),
            StepKind::FiberContraction { base } => println!("fiber contraction onto {base:?}"),
        }
    }
    println!(
        "m = {}, degrees {:?}, picard ranks {:?}",
        r.m, r.degrees, r.picard_ranks
    );
    Ok(())
}
