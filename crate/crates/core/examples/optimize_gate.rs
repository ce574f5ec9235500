//! Gradient ascent of e_p from Haar-random starts, followed by a
//! gradient/Hessian certificate of the best gate.
//!
//! `cargo run --release --example optimize_gate -- 3/2 1`

use spinpow::optimize::{known_maximum, optimize_ep, OptimizerConfig};
use spinpow::HalfInt;

fn main() -> spinpow::Result<()> {
    let mut args = std::env::args().skip(1);
    let j: HalfInt = args.next().unwrap_or_else(|| "1".into()).parse()?;
    let q: i32 = args.next().map_or(1, |s| s.parse().expect("q must be an integer"));

    let cfg = OptimizerConfig::for_spin(j, 0);
    let res = optimize_ep(j, q, &cfg)?;
    println!("j = {j}, q = {q}: best e_p = {:.12} from restart {}", res.ep, res.best_restart);
    match known_maximum(j, q) {
        Some(k) => println!("known maximum {k:.12}"),
        None => println!("no proven maximum for this case; the value is a numerical best"),
    }
    println!("{} of {} restarts converged", res.converged_restarts, cfg.restarts);
    let r = &res.report;
    println!("gradient norm {:.2e}, classification {:?}", r.grad_norm, r.classification);
    for (value, mult) in r.degeneracies(1e-6) {
        println!("  Hessian eigenvalue {value:+.6} x {mult}");
    }
    Ok(())
}
