//! Brute-force entangling power: apply the gate to spin-coherent states,
//! reduce to `q` qubits, and average the linear entropy over the sphere.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, SpinError};
use crate::geometry::UnitaryGate;
use crate::halfint::HalfInt;
use crate::linalg::{c, re, CMatrix, CVector};
use crate::operators::space;

/// Largest `2j` for which the explicit qubit embedding is built.
pub const MAX_QUBITS: i32 = 12;

/// A normalized state of `H(j)`, components ordered `m = j, ..., -j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinState {
    j: HalfInt,
    amplitudes: CVector,
}

impl SpinState {
    pub fn new(j: HalfInt, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != j.dim() {
            return Err(SpinError::DimensionMismatch { expected: j.dim(), got: amplitudes.len() });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return domain(format!("state norm {norm} is not 1"));
        }
        Ok(SpinState { j, amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(j: HalfInt, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return domain("zero vector has no direction");
        }
        Self::new(j, amplitudes / re(norm))
    }

    /// The basis state `|j, m>`.
    pub fn basis(j: HalfInt, m: HalfInt) -> Result<Self> {
        if !j.admits(m) {
            return domain(format!("projection {m} invalid for j = {j}"));
        }
        let mut v = CVector::zeros(j.dim());
        v[j.index_of(m)] = re(1.0);
        Ok(SpinState { j, amplitudes: v })
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn apply(&self, u: &UnitaryGate) -> SpinState {
        assert_eq!(u.j(), self.j, "spin mismatch");
        SpinState { j: self.j, amplitudes: u.matrix() * &self.amplitudes }
    }

    pub fn overlap(&self, other: &SpinState) -> num_complex::Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// `D(φ, θ, 0)|j, j>`, the coherent state pointing along `(θ, φ)`.
pub fn spin_coherent(j: HalfInt, theta: f64, phi: f64) -> SpinState {
    let n = j.twice();
    let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut binom = 1.0f64;
    let amplitudes = CVector::from_iterator(
        j.dim(),
        (0..=n).map(|k| {
            // k = j - m spin flips
            let mag = binom.sqrt() * ch.powi(n - k) * sh.powi(k);
            binom = binom * f64::from(n - k) / f64::from(k + 1);
            let m = f64::from(n - 2 * k) / 2.0;
            c(0.0, -m * phi).exp() * mag
        }),
    );
    SpinState { j, amplitudes }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionMethod {
    /// Rescale the multipole components of `|ψ><ψ|`.
    #[default]
    Multipole,
    /// Embed in `2j` qubits as a Dicke superposition and trace explicitly.
    QubitTrace,
}

fn check_reduction_q(j: HalfInt, q: i32) -> Result<()> {
    if q < 1 || q > j.twice() {
        return domain(format!("bipartition q = {q} outside 1..=2j for j = {j}"));
    }
    Ok(())
}

/// Whether `q` is one of the canonical bipartitions `1..=⌊j⌋`.
pub fn is_canonical(j: HalfInt, q: i32) -> bool {
    (1..=j.floor()).contains(&q)
}

fn ln_fact(n: i32) -> f64 {
    (2..=n).map(|k| f64::from(k).ln()).sum()
}

/// Ratio between the rank-σ multipole components of the `q`-qubit reduced
/// state and of the full state.
pub fn multipole_scaling(j: HalfInt, q: i32, sigma: i32) -> f64 {
    let n = j.twice();
    let log = ln_fact(q) - ln_fact(n) + 0.5 * (ln_fact(n - sigma) + ln_fact(n + sigma + 1) - ln_fact(q - sigma) - ln_fact(q + sigma + 1));
    log.exp()
}

/// State of the first `q` qubits, as a density matrix on `H(q/2)`.
pub fn reduced_state(psi: &SpinState, q: i32, method: ReductionMethod) -> Result<CMatrix> {
    let j = psi.j;
    check_reduction_q(j, q)?;
    match method {
        ReductionMethod::Multipole => Ok(reduce_multipole(psi, q)),
        ReductionMethod::QubitTrace => {
            if j.twice() > MAX_QUBITS {
                return domain(format!("qubit embedding limited to 2j <= {MAX_QUBITS}"));
            }
            Ok(reduce_qubits(psi, q))
        }
    }
}

fn reduce_multipole(psi: &SpinState, q: i32) -> CMatrix {
    let full = space(psi.j);
    let part = space(HalfInt::from_twice(q));
    let mut rho = CMatrix::zeros(part.dim(), part.dim());
    let v = &psi.amplitudes;
    for sigma in 0..=q as usize {
        let scale = multipole_scaling(psi.j, q, sigma as i32);
        for (t_full, t_part) in full.multipoles[sigma].iter().zip(&part.multipoles[sigma]) {
            // Tr(T† |ψ><ψ|) = <ψ|T†|ψ> = conj(<ψ|T|ψ>)
            let comp = v.dotc(&(t_full * v)).conj();
            rho += t_part * (comp * scale);
        }
    }
    rho
}

/// Dicke embedding of `|j, m>` into `2j` qubits; bit 1 marks a flipped qubit
/// and qubit 0 is the most significant bit.
pub fn dicke_embedding(psi: &SpinState) -> CVector {
    let n = psi.j.twice() as u32;
    let mut out = CVector::zeros(1 << n);
    let norms: Vec<f64> = (0..=n).map(|k| binomial(n, k).sqrt()).collect();
    for idx in 0..(1usize << n) {
        let k = idx.count_ones() as usize;
        out[idx] = psi.amplitudes[k] / norms[k];
    }
    out
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Projects a symmetric `n`-qubit vector back onto `H(n/2)`.
pub fn dicke_projection(v: &CVector, n: u32) -> CVector {
    let mut out = CVector::zeros(n as usize + 1);
    for idx in 0..(1usize << n) {
        out[idx.count_ones() as usize] += v[idx];
    }
    for k in 0..=n {
        out[k as usize] /= re(binomial(n, k).sqrt());
    }
    out
}

fn reduce_qubits(psi: &SpinState, q: i32) -> CMatrix {
    let n = psi.j.twice() as u32;
    let q = q as u32;
    let big = dicke_embedding(psi);
    let rest = 1usize << (n - q);
    // Rows: first q qubits collapsed onto their Dicke labels; columns: the rest.
    let mut reduced_rows = CMatrix::zeros(q as usize + 1, rest);
    let norms: Vec<f64> = (0..=q).map(|k| binomial(q, k).sqrt()).collect();
    for a in 0..(1usize << q) {
        let k = a.count_ones() as usize;
        for b in 0..rest {
            reduced_rows[(k, b)] += big[a * rest + b] / norms[k];
        }
    }
    &reduced_rows * reduced_rows.adjoint()
}

/// `E = d/(d-1) (1 − Tr ρ²)` with `d = q + 1`, using the multipole route.
pub fn linear_entropy(psi: &SpinState, q: i32) -> Result<f64> {
    linear_entropy_with(psi, q, ReductionMethod::Multipole)
}

pub fn linear_entropy_with(psi: &SpinState, q: i32, method: ReductionMethod) -> Result<f64> {
    let rho = reduced_state(psi, q, method)?;
    Ok(entropy_of(&rho))
}

/// Normalized linear entropy of a density matrix.
pub fn entropy_of(rho: &CMatrix) -> f64 {
    let d = rho.nrows() as f64;
    let purity: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
    d / (d - 1.0) * (1.0 - purity)
}

/// Purity `Tr ρ²` of the `q`-qubit marginal.
pub fn purity(psi: &SpinState, q: i32) -> Result<f64> {
    let rho = reduced_state(psi, q, ReductionMethod::Multipole)?;
    Ok(rho.iter().map(|z| z.norm_sqr()).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss-Legendre nodes in `cos θ`.
    pub n_theta: usize,
    /// Uniform nodes in `φ`.
    pub n_phi: usize,
    pub method: ReductionMethod,
}

impl QuadratureSpec {
    pub fn default_for(j: HalfInt) -> Self {
        let n = j.twice() as usize;
        QuadratureSpec { n_theta: n + 2, n_phi: 2 * n + 2, method: ReductionMethod::Multipole }
    }

    /// True when the rule cannot integrate degree-4j spherical polynomials exactly.
    pub fn is_undersized(&self, j: HalfInt) -> bool {
        let n = j.twice() as usize;
        self.n_theta < n + 1 || self.n_phi < 2 * n + 1
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Sphere nodes `(θ, φ, w)` with weights summing to one.
pub fn sphere_rule(n_theta: usize, n_phi: usize) -> Vec<(f64, f64, f64)> {
    let (xs, ws) = gauss_legendre(n_theta);
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for (x, w) in xs.iter().zip(&ws) {
        let theta = x.clamp(-1.0, 1.0).acos();
        for k in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64;
            out.push((theta, phi, w / (2.0 * n_phi as f64)));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureEp {
    pub value: f64,
    /// Set when the rule is too small to be exact; the value is then approximate.
    pub undersized: bool,
}

/// Entangling power as a sphere average of `E_q(U|j, n>)`.
pub fn ep_quadrature(u: &UnitaryGate, q: i32, spec: &QuadratureSpec) -> Result<QuadratureEp> {
    let j = u.j();
    if !is_canonical(j, q) {
        return domain(format!("bipartition q = {q} outside 1..=⌊j⌋ for j = {j}"));
    }
    if spec.n_theta == 0 || spec.n_phi == 0 {
        return domain("quadrature needs at least one node per direction");
    }
    if spec.method == ReductionMethod::QubitTrace && j.twice() > MAX_QUBITS {
        return domain(format!("qubit embedding limited to 2j <= {MAX_QUBITS}"));
    }
    let nodes = sphere_rule(spec.n_theta, spec.n_phi);
    let terms: Vec<f64> = nodes
        .par_iter()
        .map(|&(theta, phi, w)| {
            let psi = spin_coherent(j, theta, phi).apply(u);
            w * linear_entropy_with(&psi, q, spec.method).expect("q checked above")
        })
        .collect();
    Ok(QuadratureEp { value: terms.iter().sum(), undersized: spec.is_undersized(j) })
}
