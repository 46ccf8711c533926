//! Iterated blowups of torus-fixed points starting from P(O + O(3)) over P2.
use torifan::mmp::enumerate_fixed_point_blowups;
use torifan::verify::data::bundle_o3;

fn main() -> torifan::Result<()> {
    let depth = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(8);
    let report = enumerate_fixed_point_blowups(&bundle_o3(), depth)?;
    for l in &report.levels {
        println!(
            "depth {}: {} fans, {} anticanonical models",
            l.depth, l.nodes, l.hull_classes
        );
    }
    println!(
        "max rho {} at depth {}",
        report.max_rho, report.max_rho_depth
    );
    for w in &report.witnesses {
        println!("witness: degree {}, centers {:?}", w.degree, w.blowups);
    }
    if let Some(e) = report.depth_error() {
        println!("{e}");
    }
    Ok(())
}
