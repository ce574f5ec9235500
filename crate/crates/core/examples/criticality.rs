//! Gradient and Hessian of e_p at the catalog gates.

use spinpow::catalog::KnownGate;
use spinpow::criticality::{certify_with, DEFAULT_ZERO_TOL};

fn main() -> spinpow::Result<()> {
    for g in KnownGate::ALL {
        let reference = match g {
            KnownGate::J1Omega | KnownGate::J1Perm => Some(-4.0),
            KnownGate::J32Opt => Some(-8.0),
            _ => None,
        };
        let r = certify_with(&g.gate(), g.q(), 1e-9, DEFAULT_ZERO_TOL, reference)?;
        let groups: Vec<String> = r.degeneracies(1e-6).iter().map(|(v, n)| format!("{v:+.4}x{n}")).collect();
        println!("{:9} |grad| = {:.1e}  {:?}  spectrum {}", g.id(), r.grad_norm, r.classification, groups.join(" "));
        if let Some(s) = r.scale_factor {
            println!("          reference / computed scale {s:.6}");
        }
    }
    Ok(())
}
