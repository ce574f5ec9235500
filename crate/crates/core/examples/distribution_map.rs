//! Entanglement over the sphere of spin-coherent inputs: grid export, Husimi
//! decomposition, local extrema and a discrete symmetry.
//!
//! `cargo run --example distribution_map -- /tmp/j32.csv`

use std::path::PathBuf;

use spinpow::catalog::KnownGate;
use spinpow::distribution::{axis_rotation, distribution_grid, export_grid, extrema, husimi_decomposition, symmetry_residual, ExtremumKind, GridMetadata};

fn main() -> spinpow::Result<()> {
    let g = KnownGate::J32Opt;
    let u = g.gate();
    let samples = distribution_grid(&u, 1, 50, 100)?;
    let found = extrema(&u, 1, 30, 60)?;
    let meta = GridMetadata::describe(u.j(), 1, g.id(), 50, 100, &samples, true).refine(&found);
    println!("range [{:.9}, {:.9}], expected [8/9, 80/81] = [{:.9}, {:.9}]", meta.min, meta.max, 8.0 / 9.0, 80.0 / 81.0);
    println!(
        "{} minima, {} maxima",
        found.iter().filter(|e| e.kind == ExtremumKind::Min).count(),
        found.iter().filter(|e| e.kind == ExtremumKind::Max).count()
    );

    let dec = husimi_decomposition(&u, 1)?;
    println!("D_1 eigenvalues: {:?}", dec.eigenvalues.iter().map(|x| (x * 1e9).round() / 1e9).collect::<Vec<_>>());
    println!("e_p from the eigenvalue sum: {:.12}", dec.ep());

    let c5 = axis_rotation([0.0, 0.0, 1.0], 2.0 * std::f64::consts::PI / 5.0);
    println!("residual under a 2pi/5 turn about z: {:.2e}", symmetry_residual(&u, 1, c5)?);

    if let Some(path) = std::env::args().nth(1).map(PathBuf::from) {
        let sidecar = export_grid(&path, &samples, &meta)?;
        println!("wrote {} and {}", path.display(), sidecar.display());
    }
    Ok(())
}
