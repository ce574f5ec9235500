//! Runs the built-in verification suite and prints any failures.
//!
//! `cargo run --release --example self_check -- oracle`

use spinpow::verify::{run, Scope, VerifyOptions};

fn main() -> spinpow::Result<()> {
    let scope: Scope = std::env::args().nth(1).unwrap_or_else(|| "all".into()).parse()?;
    let report = run(scope, &VerifyOptions::default())?;
    for c in report.failures() {
        println!("FAIL {}: computed {} expected {} (tol {:e})", c.name, c.computed, c.expected, c.tolerance);
    }
    println!("{}/{} checks passed in scope {}", report.total - report.failed, report.total, report.scope);
    if !report.passed {
        std::process::exit(1);
    }
    Ok(())
}
