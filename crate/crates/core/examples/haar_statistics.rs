//! Haar averages of the entangling power: exact value against a Monte-Carlo
//! estimate, plus a histogram of the sampled values.

use spinpow::haar::{average_ep_analytic, average_ep_mc, histogram, nonsymmetric_average};
use spinpow::HalfInt;

fn main() -> spinpow::Result<()> {
    for (twice, q) in [(2, 1), (3, 1), (4, 1), (4, 2)] {
        let j = HalfInt::from_twice(twice);
        let exact = average_ep_analytic(j, q)?;
        let mc = average_ep_mc(j, q, 10_000, 2024)?;
        println!(
            "j = {j:>3}, q = {q}: exact {exact:.6}, MC {:.6} +- {:.6} ({:+.2} sigma)",
            mc.mean,
            mc.std_error,
            (mc.mean - exact) / mc.std_error
        );
        if (twice, q) == (2, 1) {
            for b in histogram(&mc.samples, 12, 0.0, 0.6) {
                println!("    [{:.2}, {:.2}) {}", b.bin_left, b.bin_right, "#".repeat(b.count / 40));
            }
        }
    }
    println!("two distinguishable qubits: {:.6}", nonsymmetric_average(2, 2, 1)?);
    Ok(())
}
