//! Haar-random gates and their entangling-power statistics.
//!
//! Randomness comes from ChaCha20 (`rand_chacha`): run `i` of seed `s` uses
//! `ChaCha20Rng::seed_from_u64(s)` with `set_stream(i)`, so every sample is
//! reproducible on its own and parallel runs aggregate identically.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::{ep_geometric, UnitaryGate};
use crate::halfint::HalfInt;
use crate::linalg::{c, CMatrix};

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Ginibre matrix orthonormalized by QR, with the phases of `diag(R)` moved into `Q`.
pub fn haar_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(d, d, |_, _| {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        c(a, b) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let rk = r[(k, k)];
        let phase = if rk.norm() > 0.0 { rk / rk.norm() } else { c(1.0, 0.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

pub fn haar_gate<R: Rng + ?Sized>(j: HalfInt, rng: &mut R) -> UnitaryGate {
    UnitaryGate::from_matrix(j, haar_matrix(j.dim(), rng)).expect("QR factor is unitary")
}

/// Haar gate on `C^d`, `d = 2j+1`, from stream 0 of `seed`.
pub fn haar_unitary(d: usize, seed: u64) -> Result<UnitaryGate> {
    if d < 2 {
        return domain(format!("Haar sampling needs d >= 2, got {d}"));
    }
    let j = HalfInt::from_twice(d as i32 - 1);
    Ok(haar_gate(j, &mut stream_rng(seed, 0)))
}

/// The `index`-th gate of the sequence drawn from `seed`.
pub fn haar_sample(j: HalfInt, seed: u64, index: u64) -> UnitaryGate {
    haar_gate(j, &mut stream_rng(seed, index))
}

fn check_q(j: HalfInt, q: i32) -> Result<()> {
    if q < 1 || q > j.floor() {
        return domain(format!("bipartition q = {q} outside 1..=⌊j⌋ for j = {j}"));
    }
    Ok(())
}

/// `1 − 1/(2j+1−q)`.
pub fn average_ep_analytic(j: HalfInt, q: i32) -> Result<f64> {
    check_q(j, q)?;
    Ok(1.0 - 1.0 / f64::from(j.twice() + 1 - q))
}

/// Same average written with dimensions: `1 − dim H(q/2) / dim(H(q/2) ⊗ H(j−q/2))`.
pub fn average_ep_from_dims(j: HalfInt, q: i32) -> Result<f64> {
    check_q(j, q)?;
    let reduced = f64::from(q + 1);
    let rest = f64::from(j.twice() - q + 1);
    Ok(1.0 - reduced / (reduced * rest))
}

/// Average over `SU(D^n)` for `n` distinguishable qudits: `1 − (D^q + 1)/(D^n + 1)`.
pub fn nonsymmetric_average(local_dim: u32, n: u32, q: u32) -> Result<f64> {
    if local_dim < 2 || q == 0 || q >= n {
        return domain("need D >= 2 and 0 < q < n");
    }
    let dq = f64::from(local_dim).powi(q as i32);
    let dn = f64::from(local_dim).powi(n as i32);
    Ok(1.0 - (dq + 1.0) / (dn + 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: Vec<f64>,
}

/// Monte-Carlo mean of `e_p` over `n_samples` Haar gates.
pub fn average_ep_mc(j: HalfInt, q: i32, n_samples: usize, seed: u64) -> Result<McEstimate> {
    check_q(j, q)?;
    if n_samples < 100 {
        return domain(format!("need at least 100 samples, got {n_samples}"));
    }
    let samples: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| ep_geometric(&haar_sample(j, seed, i), q).expect("q checked above"))
        .collect();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(McEstimate { mean, std_error: (var / n).sqrt(), samples })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub count: usize,
}

/// Equal-width histogram on `[lo, hi]`; the last bin is closed on the right.
pub fn histogram(values: &[f64], bins: usize, lo: f64, hi: f64) -> Vec<HistogramBin> {
    let width = (hi - lo) / bins as f64;
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|b| HistogramBin { bin_left: lo + b as f64 * width, bin_right: lo + (b + 1) as f64 * width, count: 0 })
        .collect();
    for &v in values {
        if v < lo || v > hi {
            continue;
        }
        let b = (((v - lo) / width) as usize).min(bins - 1);
        out[b].count += 1;
    }
    out
}

pub fn write_histogram_csv<W: Write>(out: W, bins: &[HistogramBin]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for b in bins {
        w.serialize(b)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, unitarity_deviation};

    #[test]
    fn sampled_gates_are_unitary_and_reproducible() {
        let a = haar_unitary(4, 11).unwrap();
        let b = haar_unitary(4, 11).unwrap();
        assert!(unitarity_deviation(a.matrix()) < 1e-12);
        assert_eq!(a.matrix(), b.matrix());
        assert!(max_abs_diff(a.matrix(), haar_unitary(4, 12).unwrap().matrix()) > 1e-3);
        assert!(haar_unitary(1, 0).is_err());
    }

    #[test]
    fn table_averages() {
        let h = HalfInt::from_twice;
        assert!((average_ep_analytic(h(2), 1).unwrap() - 0.5).abs() < 1e-15);
        assert!((average_ep_analytic(h(3), 1).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((average_ep_analytic(h(4), 1).unwrap() - 0.75).abs() < 1e-15);
        assert!((average_ep_analytic(h(4), 2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((average_ep_analytic(h(5), 2).unwrap() - 0.75).abs() < 1e-15);
        for tj in 2..=8 {
            for q in 1..=h(tj).floor() {
                assert!((average_ep_analytic(h(tj), q).unwrap() - average_ep_from_dims(h(tj), q).unwrap()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn nonsymmetric_two_qubits() {
        // 1 - 3/5 for two qubits
        assert!((nonsymmetric_average(2, 2, 1).unwrap() - 0.4).abs() < 1e-15);
        assert!(nonsymmetric_average(2, 2, 2).is_err());
    }

    #[test]
    fn histogram_counts_everything_in_range() {
        let bins = histogram(&[0.0, 0.1, 0.5, 1.0, 1.5], 4, 0.0, 1.0);
        assert_eq!(bins.iter().map(|b| b.count).sum::<usize>(), 4);
        assert_eq!(bins[3].count, 1);
        let mut buf = Vec::new();
        write_histogram_csv(&mut buf, &bins).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("bin_left,bin_right,count\n"));
    }

    #[test]
    fn mc_rejects_tiny_runs() {
        assert!(average_ep_mc(HalfInt::ONE, 1, 10, 0).is_err());
    }
}
