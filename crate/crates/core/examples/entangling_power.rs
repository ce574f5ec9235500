//! Entangling power of the catalog gates, with the hyperplane residuals of
//! the inner-product form and the U versus U† gap.

use spinpow::catalog::KnownGate;
use spinpow::geometry::{cartan_j1, dagger_gap, ep_closed_small, ep_geometric, ep_j1_trace_form, hyperplane_residuals, transformed_n, Basis};
use spinpow::haar::haar_sample;
use spinpow::HalfInt;

fn main() -> spinpow::Result<()> {
    for g in KnownGate::ALL {
        let u = g.gate();
        let (num, den) = g.ep_fraction();
        println!(
            "{:9} j={} q={}  e_p = {:.12}  (expected {num}/{den}{})  closed form {:.12}",
            g.id(),
            g.j(),
            g.q(),
            ep_geometric(&u, g.q())?,
            if g.conjectural() { ", conjectural maximum" } else { "" },
            ep_closed_small(&u, g.q())?,
        );
    }

    let u0 = KnownGate::J1Omega.gate();
    println!("U_0 P-vector of U N: {:?}", transformed_n(&u0, Basis::P).components);
    println!("spin-1 trace form at U_0: {:.12}", ep_j1_trace_form(&u0)?);

    let third = std::f64::consts::FRAC_PI_3;
    let (a, ep) = cartan_j1(third, 0.0, -third)?;
    println!("Cartan (pi/3, 0, -pi/3): formula {ep:.12}, geometric {:.12}", ep_geometric(&a, 1)?);

    let u = haar_sample(HalfInt::integer(2), 7, 0);
    let r = hyperplane_residuals(&u, 1)?;
    println!("random j=2 gate: e_p = {:.6}, residuals {:.1e} {:.1e} {:.1e}", ep_geometric(&u, 1)?, r.n_plane, r.m_plane, r.m_plane_t);
    println!("  e_p(U) - e_p(U^dagger) = {:+.3e}", dagger_gap(&u, 1)?);
    Ok(())
}
