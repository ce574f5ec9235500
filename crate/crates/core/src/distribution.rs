//! Entanglement as a function on the sphere, `E_q(U|j, n>)`.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::{mat3_mul, rotation_matrix};
use crate::error::{domain, Result};
use crate::geometry::UnitaryGate;
use crate::halfint::HalfInt;
use crate::linalg::{kron, sorted_hermitian_eigen, CMatrix, CVector};
use crate::operators::space;
use crate::oracle::{sphere_rule, spin_coherent, QuadratureSpec, SpinState};

/// Eigenvalues of `D_q` closer than this are treated as one degenerate group.
pub const DEGENERACY_TOL: f64 = 1e-9;

fn check_q(j: HalfInt, q: i32) -> Result<()> {
    if q < 1 || q > j.floor() {
        return domain(format!("bipartition q = {q} outside 1..=⌊j⌋ for j = {j}"));
    }
    Ok(())
}

/// `D_q(U)` restricted to the `L = 2j` block, basis `|2j, M>` with `M` descending.
pub fn dq_matrix(u: &UnitaryGate, q: i32) -> Result<CMatrix> {
    let j = u.j();
    check_q(j, q)?;
    let sp = space(j);
    let m = sp.operator_m(q)?;
    let v = kron(u.matrix(), u.matrix()) * &sp.top_block;
    let d = v.adjoint() * (&*m * &v);
    Ok((&d + d.adjoint()) * crate::linalg::re(0.5))
}

/// Pointwise evaluator built once per gate.
pub struct Distribution {
    j: HalfInt,
    dq: CMatrix,
}

impl Distribution {
    pub fn new(u: &UnitaryGate, q: i32) -> Result<Self> {
        Ok(Distribution { j: u.j(), dq: dq_matrix(u, q)? })
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn dq(&self) -> &CMatrix {
        &self.dq
    }

    pub fn at(&self, theta: f64, phi: f64) -> f64 {
        let sc = spin_coherent(HalfInt::from_twice(2 * self.j.twice()), theta, phi);
        let v = sc.amplitudes();
        1.0 - v.dotc(&(&self.dq * v)).re
    }

    /// Value at the unit vector `n` (normalized internally).
    pub fn at_direction(&self, n: [f64; 3]) -> f64 {
        let (theta, phi) = to_angles(n);
        self.at(theta, phi)
    }
}

/// `E_q(U|j, n>) = 1 − <2j, n|D_q|2j, n>`.
pub fn entanglement_at(u: &UnitaryGate, q: i32, theta: f64, phi: f64) -> Result<f64> {
    Ok(Distribution::new(u, q)?.at(theta, phi))
}

pub fn to_angles(n: [f64; 3]) -> (f64, f64) {
    let r = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    ((n[2] / r).clamp(-1.0, 1.0).acos(), n[1].atan2(n[0]))
}

pub fn to_direction(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

#[derive(Clone, Debug)]
pub struct HusimiDecomposition {
    pub j: HalfInt,
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// States of spin `2j`, paired with `eigenvalues`.
    pub eigenstates: Vec<SpinState>,
}

impl HusimiDecomposition {
    /// `1 − Σ σ_k |<2j, n|ψ_k>|²`.
    pub fn entanglement_at(&self, theta: f64, phi: f64) -> f64 {
        let sc = spin_coherent(HalfInt::from_twice(2 * self.j.twice()), theta, phi);
        1.0 - self
            .eigenvalues
            .iter()
            .zip(&self.eigenstates)
            .map(|(s, psi)| s * sc.overlap(psi).norm_sqr())
            .sum::<f64>()
    }

    /// `1 − Σ σ_k / (4j+1)`.
    pub fn ep(&self) -> f64 {
        1.0 - self.eigenvalues.iter().sum::<f64>() / self.eigenvalues.len() as f64
    }
}

/// Makes the first non-negligible component real and positive.
fn fix_phase(v: &mut CVector) {
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-8).copied() {
        let phase = z / z.norm();
        *v /= phase;
    }
}

/// Eigendecomposition of `D_q` with degenerate groups re-orthonormalized by
/// Gram-Schmidt on the projected canonical basis vectors, in order.
pub fn husimi_decomposition(u: &UnitaryGate, q: i32) -> Result<HusimiDecomposition> {
    let dq = dq_matrix(u, q)?;
    let (vals, vecs) = sorted_hermitian_eigen(&dq);
    let n = vals.len();
    let big = HalfInt::from_twice(2 * u.j().twice());
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenstates = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (vals[end - 1] - vals[end]).abs() < DEGENERACY_TOL {
            end += 1;
        }
        let block = vecs.columns(start, end - start);
        let projector = &block * block.adjoint();
        let mut chosen: Vec<CVector> = Vec::new();
        for k in 0..n {
            if chosen.len() == end - start {
                break;
            }
            let mut v = projector.column(k).into_owned();
            for w in &chosen {
                let overlap = w.dotc(&v);
                v -= w * overlap;
            }
            let norm = v.norm();
            if norm > 1e-6 {
                v /= crate::linalg::re(norm);
                chosen.push(v);
            }
        }
        let mean = vals[start..end].iter().sum::<f64>() / (end - start) as f64;
        for mut v in chosen {
            fix_phase(&mut v);
            eigenvalues.push(mean);
            eigenstates.push(SpinState::normalized(big, v)?);
        }
        start = end;
    }
    Ok(HusimiDecomposition { j: u.j(), eigenvalues, eigenstates })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceCase {
    /// Spin 1, permutation gate, `q = 1`.
    J1U0prime,
    /// Spin 3/2 optimum, `q = 1`.
    J32U0,
    /// Spin 2 `q = 2` candidate, expressed through the spin-3/2 profile.
    J2Q2Affine,
}

/// Closed forms of the entanglement distribution at the direction `(θ, φ)`
/// of [`spin_coherent`]. The formulas measure the azimuth from the `−x`
/// axis, so they are evaluated at `φ + π`.
pub fn reference_distribution(case: ReferenceCase, theta: f64, phi: f64) -> f64 {
    closed_form_native(case, theta, phi + std::f64::consts::PI)
}

/// The closed forms with the azimuth measured from the `−x` axis.
pub fn closed_form_native(case: ReferenceCase, theta: f64, phi: f64) -> f64 {
    match case {
        ReferenceCase::J1U0prime => {
            let (s, c) = ((theta / 2.0).sin(), (theta / 2.0).cos());
            4.0 * 2f64.sqrt() * s.powi(5) * c.powi(3) * (3.0 * phi).cos()
                + s * s / 32.0 * (90.0 + 105.0 * theta.cos() + 54.0 * (2.0 * theta).cos() + 7.0 * (3.0 * theta).cos())
        }
        ReferenceCase::J32U0 => {
            (1090.0 + 192.0 * theta.sin().powi(5) * theta.cos() * (5.0 * phi).sin()
                - 15.0 * (2.0 * theta).cos()
                - 18.0 * (4.0 * theta).cos()
                - 33.0 * (6.0 * theta).cos())
                / 1152.0
        }
        ReferenceCase::J2Q2Affine => (9.0 * closed_form_native(ReferenceCase::J32U0, theta, phi) - 5.0) / 4.0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereSample {
    pub theta: f64,
    pub phi: f64,
    pub value: f64,
}

impl SphereSample {
    /// Stereographic projection from the south pole, `tan(θ/2) (cos φ, sin φ)`.
    pub fn stereographic(&self) -> (f64, f64) {
        let r = (self.theta / 2.0).tan();
        (r * self.phi.cos(), r * self.phi.sin())
    }
}

/// Angles of a row-major grid: `θ_i = π i/(n_theta−1)` (both poles included),
/// `φ_k = 2π k/n_phi`.
pub fn grid_angles(n_theta: usize, n_phi: usize) -> Vec<(f64, f64)> {
    let pi = std::f64::consts::PI;
    (0..n_theta)
        .flat_map(|i| {
            let theta = pi * i as f64 / (n_theta - 1) as f64;
            (0..n_phi).map(move |k| (theta, 2.0 * pi * k as f64 / n_phi as f64))
        })
        .collect()
}

pub fn distribution_grid(u: &UnitaryGate, q: i32, n_theta: usize, n_phi: usize) -> Result<Vec<SphereSample>> {
    if n_theta < 2 || n_phi < 2 {
        return domain("grid needs at least 2 points per direction");
    }
    let dist = Distribution::new(u, q)?;
    Ok(grid_angles(n_theta, n_phi)
        .par_iter()
        .map(|&(theta, phi)| SphereSample { theta, phi, value: dist.at(theta, phi) })
        .collect())
}

/// Samples on the nodes of an exact sphere rule, with weights summing to one.
pub fn quadrature_samples(u: &UnitaryGate, q: i32, spec: &QuadratureSpec) -> Result<Vec<(SphereSample, f64)>> {
    let dist = Distribution::new(u, q)?;
    Ok(sphere_rule(spec.n_theta, spec.n_phi)
        .into_iter()
        .map(|(theta, phi, w)| (SphereSample { theta, phi, value: dist.at(theta, phi) }, w))
        .collect())
}

/// Points used to probe symmetries, away from the coordinate poles.
fn probe_points() -> Vec<(f64, f64)> {
    let pi = std::f64::consts::PI;
    (0..12)
        .flat_map(|i| {
            let theta = pi * (i as f64 + 0.5) / 12.0;
            (0..24).map(move |k| (theta, 2.0 * pi * (k as f64 + 0.25) / 24.0))
        })
        .collect()
}

/// `max |E(R n) − E(n)|` over a fixed probe grid, `R` given by zyz Euler angles.
pub fn symmetry_residual(u: &UnitaryGate, q: i32, rotation: (f64, f64, f64)) -> Result<f64> {
    let dist = Distribution::new(u, q)?;
    let r = rotation_matrix(rotation.0, rotation.1, rotation.2);
    Ok(probe_points()
        .into_iter()
        .map(|(theta, phi)| {
            let n = to_direction(theta, phi);
            let rn = [0, 1, 2].map(|a| r[a][0] * n[0] + r[a][1] * n[1] + r[a][2] * n[2]);
            (dist.at_direction(rn) - dist.at(theta, phi)).abs()
        })
        .fold(0.0, f64::max))
}

/// Euler angles of the rotation by `angle` about `axis`.
pub fn axis_rotation(axis: [f64; 3], angle: f64) -> (f64, f64, f64) {
    let (theta, phi) = to_angles(axis);
    // R = Rz(φ) Ry(θ) Rz(angle) Ry(-θ) Rz(-φ), then read off zyz angles.
    let a = mat3_mul(&rotation_matrix(phi, theta, angle), &rotation_matrix(0.0, -theta, -phi));
    matrix_to_euler(&a)
}

fn matrix_to_euler(r: &[[f64; 3]; 3]) -> (f64, f64, f64) {
    let beta = r[2][2].clamp(-1.0, 1.0).acos();
    if beta.sin().abs() > 1e-12 {
        (r[1][2].atan2(r[0][2]), beta, r[2][1].atan2(-r[2][0]))
    } else if r[2][2] > 0.0 {
        (r[1][0].atan2(r[0][0]), 0.0, 0.0)
    } else {
        ((-r[0][1]).atan2(r[1][1]), std::f64::consts::PI, 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremumKind {
    Min,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub kind: ExtremumKind,
    pub direction: [f64; 3],
    pub value: f64,
}

/// Local minima and maxima: seeded from a grid, polished by a tangent-plane
/// descent, and merged when closer than `1e-3` rad.
pub fn extrema(u: &UnitaryGate, q: i32, n_theta: usize, n_phi: usize) -> Result<Vec<Extremum>> {
    let dist = Distribution::new(u, q)?;
    let pts = grid_angles(n_theta.max(3), n_phi.max(3));
    let vals: Vec<f64> = pts.iter().map(|&(t, p)| dist.at(t, p)).collect();
    let mut found: Vec<Extremum> = Vec::new();
    for (idx, &(theta, phi)) in pts.iter().enumerate() {
        let n = to_direction(theta, phi);
        for kind in [ExtremumKind::Min, ExtremumKind::Max] {
            let sign = if kind == ExtremumKind::Min { 1.0 } else { -1.0 };
            // seed only at points not worse than their grid neighbours
            let neighbours = pts.iter().zip(&vals).filter(|((t, p), _)| {
                let m = to_direction(*t, *p);
                let cosang = n[0] * m[0] + n[1] * m[1] + n[2] * m[2];
                cosang > (2.5 * std::f64::consts::PI / (n_theta.max(3) - 1) as f64).cos() && cosang < 1.0 - 1e-14
            });
            if neighbours.into_iter().any(|(_, v)| sign * v < sign * vals[idx] - 1e-12) {
                continue;
            }
            let (dir, value) = polish(&dist, n, sign);
            let duplicate = found.iter().any(|e| {
                e.kind == kind && (e.direction[0] * dir[0] + e.direction[1] * dir[1] + e.direction[2] * dir[2]).clamp(-1.0, 1.0).acos() < 1e-3
            });
            if !duplicate {
                found.push(Extremum { kind, direction: dir, value });
            }
        }
    }
    Ok(found)
}

fn polish(dist: &Distribution, start: [f64; 3], sign: f64) -> ([f64; 3], f64) {
    let f = |n: [f64; 3]| sign * dist.at_direction(n);
    let normalize = |v: [f64; 3]| {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        [v[0] / r, v[1] / r, v[2] / r]
    };
    let mut n = start;
    let mut fx = f(n);
    let mut step = 0.1;
    for _ in 0..500 {
        let (t1, t2) = tangent_basis(n);
        let eps = 1e-6;
        let g1 = (f(normalize(add(n, t1, eps))) - f(normalize(add(n, t1, -eps)))) / (2.0 * eps);
        let g2 = (f(normalize(add(n, t2, eps))) - f(normalize(add(n, t2, -eps)))) / (2.0 * eps);
        let gn = (g1 * g1 + g2 * g2).sqrt();
        if gn < 1e-10 {
            break;
        }
        let dir = [-(g1 * t1[0] + g2 * t2[0]) / gn, -(g1 * t1[1] + g2 * t2[1]) / gn, -(g1 * t1[2] + g2 * t2[2]) / gn];
        let mut accepted = false;
        while step > 1e-12 {
            let cand = normalize(add(n, dir, step));
            let fc = f(cand);
            if fc < fx {
                n = cand;
                fx = fc;
                step *= 1.5;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (n, sign * fx)
}

fn add(a: [f64; 3], b: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

fn tangent_basis(n: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let cross = |a: [f64; 3], b: [f64; 3]| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let t1 = cross(n, helper);
    let r = (t1[0] * t1[0] + t1[1] * t1[1] + t1[2] * t1[2]).sqrt();
    let t1 = [t1[0] / r, t1[1] / r, t1[2] / r];
    (t1, cross(n, t1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMetadata {
    pub j: HalfInt,
    pub q: i32,
    pub gate: String,
    pub n_theta: usize,
    pub n_phi: usize,
    /// Range over the grid points.
    pub grid_min: f64,
    pub grid_max: f64,
    /// Range after polishing local extrema off the grid; equals the grid
    /// range until [`GridMetadata::refine`] is called.
    pub min: f64,
    pub max: f64,
    pub minima: Option<usize>,
    pub maxima: Option<usize>,
    pub stereographic: bool,
}

impl GridMetadata {
    pub fn describe(j: HalfInt, q: i32, gate: impl Into<String>, n_theta: usize, n_phi: usize, samples: &[SphereSample], stereographic: bool) -> Self {
        let min = samples.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
        let max = samples.iter().map(|s| s.value).fold(f64::NEG_INFINITY, f64::max);
        GridMetadata { j, q, gate: gate.into(), n_theta, n_phi, grid_min: min, grid_max: max, min, max, minima: None, maxima: None, stereographic }
    }

    /// Widens `min`/`max` with the polished extrema and records their counts.
    pub fn refine(mut self, found: &[Extremum]) -> Self {
        for e in found {
            self.min = self.min.min(e.value);
            self.max = self.max.max(e.value);
        }
        self.minima = Some(found.iter().filter(|e| e.kind == ExtremumKind::Min).count());
        self.maxima = Some(found.iter().filter(|e| e.kind == ExtremumKind::Max).count());
        self
    }
}

#[derive(Serialize)]
struct PlainRow {
    theta: f64,
    phi: f64,
    value: f64,
}

#[derive(Serialize)]
struct StereoRow {
    theta: f64,
    phi: f64,
    value: f64,
    x: f64,
    y: f64,
}

/// CSV with columns `theta,phi,value` and, optionally, `x,y`.
pub fn write_grid_csv<W: Write>(out: W, samples: &[SphereSample], stereographic: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in samples {
        if stereographic {
            let (x, y) = s.stereographic();
            w.serialize(StereoRow { theta: s.theta, phi: s.phi, value: s.value, x, y })?;
        } else {
            w.serialize(PlainRow { theta: s.theta, phi: s.phi, value: s.value })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `<path>` as CSV and `<path>.json` as the metadata sidecar.
pub fn export_grid(path: &Path, samples: &[SphereSample], meta: &GridMetadata) -> Result<std::path::PathBuf> {
    write_grid_csv(std::fs::File::create(path)?, samples, meta.stereographic)?;
    let mut sidecar = path.as_os_str().to_owned();
    sidecar.push(".json");
    let sidecar = std::path::PathBuf::from(sidecar);
    std::fs::write(&sidecar, serde_json::to_string_pretty(meta)?)?;
    Ok(sidecar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::KnownGate;
    use crate::geometry::ep_geometric;
    use crate::linalg::max_abs_diff;
    use crate::oracle::linear_entropy;
    use std::f64::consts::PI;

    #[test]
    fn dq_identity_spin_one() {
        let dq = dq_matrix(&UnitaryGate::identity(HalfInt::ONE), 1).unwrap();
        assert!(max_abs_diff(&dq, &CMatrix::identity(5, 5)) < 1e-13);
    }

    #[test]
    fn dq_permutation_spectrum() {
        let (vals, _) = sorted_hermitian_eigen(&dq_matrix(&KnownGate::J1Perm.gate(), 1).unwrap());
        let expected = [1.0, 1.0, 1.0, 1.0, -2.0];
        assert!(vals.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-12), "{vals:?}");
    }

    #[test]
    fn dq_spin_three_halves_spectrum() {
        let (vals, _) = sorted_hermitian_eigen(&dq_matrix(&KnownGate::J32Opt.gate(), 1).unwrap());
        let low = 1.0 - 20.0 / 9.0;
        let expected = [1.0, 1.0, 1.0, 1.0, low, low, low];
        assert!(vals.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-12), "{vals:?}");
    }

    #[test]
    fn pointwise_matches_oracle() {
        let u = KnownGate::J32Opt.gate();
        for &(t, p) in &[(0.3, 0.2), (1.7, -2.0), (2.9, 4.0)] {
            let direct = linear_entropy(&spin_coherent(u.j(), t, p).apply(&u), 1).unwrap();
            assert!((entanglement_at(&u, 1, t, p).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn permutation_poles() {
        let u = KnownGate::J1Perm.gate();
        assert!(entanglement_at(&u, 1, 0.0, 0.0).unwrap().abs() < 1e-14);
        assert!((entanglement_at(&u, 1, PI, 0.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tetrahedral_state_in_decomposition() {
        let dec = husimi_decomposition(&KnownGate::J1Perm.gate(), 1).unwrap();
        assert!((dec.eigenvalues[4] + 2.0).abs() < 1e-12);
        let mut psi_t = CVector::zeros(5);
        psi_t[1] = crate::linalg::re(-(2.0f64 / 3.0).sqrt());
        psi_t[4] = crate::linalg::re((1.0f64 / 3.0).sqrt());
        assert!((dec.eigenstates[4].amplitudes().dotc(&psi_t).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decomposition_sum_gives_ep() {
        let u = KnownGate::J32Opt.gate();
        let dec = husimi_decomposition(&u, 1).unwrap();
        let sum: f64 = dec.eigenvalues.iter().sum();
        assert!((sum - 1.0 / 3.0).abs() < 1e-12);
        assert!((dec.ep() - 20.0 / 21.0).abs() < 1e-12);
        assert!((dec.ep() - ep_geometric(&u, 1).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn decomposition_is_deterministic() {
        let u = KnownGate::J32Opt.gate();
        let a = husimi_decomposition(&u, 1).unwrap();
        let b = husimi_decomposition(&u, 1).unwrap();
        for (x, y) in a.eigenstates.iter().zip(&b.eigenstates) {
            assert_eq!(x.amplitudes(), y.amplitudes());
        }
    }

    #[test]
    fn references_match_pointwise() {
        let cases = [(KnownGate::J1Perm, ReferenceCase::J1U0prime, 1), (KnownGate::J32Opt, ReferenceCase::J32U0, 1), (KnownGate::J2Q2, ReferenceCase::J2Q2Affine, 2)];
        for (g, case, q) in cases {
            let d = Distribution::new(&g.gate(), q).unwrap();
            for (t, p) in grid_angles(15, 30) {
                assert!((d.at(t, p) - reference_distribution(case, t, p)).abs() < 1e-12, "{g}");
            }
        }
    }

    #[test]
    fn reference_values() {
        assert!((reference_distribution(ReferenceCase::J1U0prime, PI, 0.3) - 1.0).abs() < 1e-14);
        assert!(((90.0 - 105.0 + 54.0 - 7.0) / 32.0 - 1.0f64).abs() < 1e-15);
    }

    #[test]
    fn small_grid_with_poles() {
        let g = distribution_grid(&KnownGate::J1Perm.gate(), 1, 2, 2).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g[0].value.abs() < 1e-14 && (g[3].value - 1.0).abs() < 1e-14);
        assert!(distribution_grid(&KnownGate::J1Perm.gate(), 1, 1, 2).is_err());
    }

    #[test]
    fn axis_rotation_is_consistent() {
        let axis = [1.0, 1.0, 1.0];
        let (a, b, g) = axis_rotation(axis, 2.0 * PI / 3.0);
        let r = rotation_matrix(a, b, g);
        // x -> y -> z -> x
        assert!((r[1][0] - 1.0).abs() < 1e-12 && (r[2][1] - 1.0).abs() < 1e-12 && (r[0][2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_columns() {
        let samples = [SphereSample { theta: 0.5, phi: 1.0, value: 0.25 }];
        let mut buf = Vec::new();
        write_grid_csv(&mut buf, &samples, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("theta,phi,value,x,y\n"));
        let mut buf = Vec::new();
        write_grid_csv(&mut buf, &samples, false).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("theta,phi,value\n"));
    }
}
