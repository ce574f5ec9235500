//! Invariant vectors of 𝒩 and 𝓜_q in the projector (P) and pair-multipole
//! (T) bases, for j = 1 .. 5/2.

use spinpow::geometry::{invariant_vector, m_vector, Basis};
use spinpow::haar::average_ep_analytic;
use spinpow::operators::{m_block_eigenvalues, operator_m, operator_n};
use spinpow::HalfInt;

fn fmt(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:+.6}")).collect();
    format!("({})", parts.join(", "))
}

fn main() -> spinpow::Result<()> {
    for twice in 2..=5 {
        let j = HalfInt::from_twice(twice);
        println!("j = {j}");
        println!("  N  (T basis) {}", fmt(&invariant_vector(&operator_n(j), Basis::T).components));
        for q in 1..=j.floor() {
            println!("  M_{q} (P basis) {}", fmt(&m_vector(j, q)?.components));
            println!("  M_{q} (T basis) {}", fmt(&invariant_vector(&operator_m(j, q)?, Basis::T).components));
            println!("  M_{q} block eigenvalues {}", fmt(&m_block_eigenvalues(j, q)?));
            println!("  Haar average of e_p at q = {q}: {:.6}", average_ep_analytic(j, q)?);
        }
    }
    Ok(())
}
