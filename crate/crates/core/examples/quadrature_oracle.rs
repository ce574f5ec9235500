//! The entangling power computed directly: average the linear entropy of
//! (U|n>) over spin-coherent inputs with an exact sphere rule, and compare
//! with the geometric formula.

use spinpow::geometry::ep_geometric;
use spinpow::haar::haar_sample;
use spinpow::oracle::{ep_quadrature, linear_entropy_with, spin_coherent, QuadratureSpec, ReductionMethod};
use spinpow::HalfInt;

fn main() -> spinpow::Result<()> {
    for twice in 2..=5 {
        let j = HalfInt::from_twice(twice);
        let spec = QuadratureSpec::default_for(j);
        for q in 1..=j.floor() {
            let mut worst: f64 = 0.0;
            for k in 0..20 {
                let u = haar_sample(j, 42, k);
                worst = worst.max((ep_quadrature(&u, q, &spec)?.value - ep_geometric(&u, q)?).abs());
            }
            println!("j = {j:>3}, q = {q}: {}x{} nodes, max |quadrature - geometric| over 20 gates = {worst:.2e}", spec.n_theta, spec.n_phi);
        }
    }

    let j = HalfInt::from_twice(3);
    let u = haar_sample(j, 1, 0);
    let psi = spin_coherent(j, 1.2, 0.5).apply(&u);
    let a = linear_entropy_with(&psi, 1, ReductionMethod::Multipole)?;
    let b = linear_entropy_with(&psi, 1, ReductionMethod::QubitTrace)?;
    println!("reduced-state routes: multipole {a:.15}, qubit trace {b:.15}");
    Ok(())
}
