//! Runs every verification suite on the built-in data and prints a summary.
use torifan::verify::{run_suite, Suite, SuiteOptions};

fn main() -> torifan::Result<()> {
    for s in Suite::ALL {
        let r = run_suite(s, &SuiteOptions::default())?;
        let a = &r.aggregates;
        println!(
            "{:<18} {:?}: {} passed, {} failed, {} skipped",
            s.id(),
            r.status,
            a.passed,
            a.failed,
            a.skipped
        );
    }
    Ok(())
}
