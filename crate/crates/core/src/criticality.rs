//! First- and second-order behaviour of `e_p` along `U -> exp(iεG) U`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::UnitaryGate;
use crate::halfint::HalfInt;
use crate::linalg::{commutator, kron, partial_trace_first, partial_trace_second, re, CMatrix, I};
use crate::operators::space;

/// Generalized Gell-Mann matrices of `su(d)`, normalized `Tr(G_a G_b) = 2δ_ab`:
/// symmetric off-diagonal, antisymmetric off-diagonal, then diagonal.
pub fn gell_mann(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d - 1);
    for k in 0..d {
        for l in k + 1..d {
            let mut s = CMatrix::zeros(d, d);
            s[(k, l)] = re(1.0);
            s[(l, k)] = re(1.0);
            out.push(s);
            let mut a = CMatrix::zeros(d, d);
            a[(k, l)] = -I;
            a[(l, k)] = I;
            out.push(a);
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut g = CMatrix::zeros(d, d);
        for k in 0..l {
            g[(k, k)] = re(norm);
        }
        g[(l, l)] = re(-(l as f64) * norm);
        out.push(g);
    }
    out
}

/// `Σ_a x_a G_a`.
pub fn generator_combination(d: usize, coeffs: &[f64]) -> CMatrix {
    gell_mann(d).iter().zip(coeffs).fold(CMatrix::zeros(d, d), |acc, (g, &x)| acc + g * re(x))
}

struct Pieces {
    w: CMatrix,
    m: CMatrix,
    gens: Vec<CMatrix>,
}

fn pieces(u: &UnitaryGate, q: i32) -> Result<Pieces> {
    let j = u.j();
    if q < 1 || q > j.floor() {
        return domain(format!("bipartition q = {q} outside 1..=⌊j⌋ for j = {j}"));
    }
    let sp = space(j);
    let v = kron(u.matrix(), u.matrix()) * &sp.top_block;
    let w = &v * v.adjoint() * re(1.0 / sp.top_block.ncols() as f64);
    let m = (*sp.operator_m(q)?).clone();
    Ok(Pieces { w, m, gens: gell_mann(j.dim()) })
}

/// `g_a = −i Tr(W [M_q, 𝒢_a])` with `W = 𝒰𝒩𝒰†`, `𝒢_a = G_a ⊗ 1 + 1 ⊗ G_a`,
/// evaluated as `−i Tr(K G_a)` where `K` is the sum of both partial traces
/// of `[W, M_q]`.
pub fn ep_gradient(u: &UnitaryGate, q: i32) -> Result<Vec<f64>> {
    let p = pieces(u, q)?;
    let d = u.j().dim();
    let cm = commutator(&p.w, &p.m);
    let k = partial_trace_first(&cm, d, d) + partial_trace_second(&cm, d, d);
    Ok(p.gens.iter().map(|g| (-I * (&k * g).trace()).re).collect())
}

/// Symmetrized `H_ab = Tr(W [[M_q, 𝒢_a], 𝒢_b])`, the second derivative of `e_p`
/// in the exponential chart.
pub fn ep_hessian(u: &UnitaryGate, q: i32) -> Result<DMatrix<f64>> {
    let p = pieces(u, q)?;
    let d = u.j().dim();
    let id = CMatrix::identity(d, d);
    let big: Vec<CMatrix> = p.gens.iter().map(|g| kron(g, &id) + kron(&id, g)).collect();
    let xs: Vec<CMatrix> = big.iter().map(|g| commutator(&p.m, g)).collect();
    let ys: Vec<CMatrix> = big.iter().map(|g| commutator(g, &p.w)).collect();
    let n = big.len();
    let mut h = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let t1 = crate::linalg::trace_product(&xs[a], &ys[b]).re;
            let t2 = crate::linalg::trace_product(&xs[b], &ys[a]).re;
            let v = 0.5 * (t1 + t2);
            h[(a, b)] = v;
            h[(b, a)] = v;
        }
    }
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Max,
    Saddle,
    Min,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalityReport {
    pub j: HalfInt,
    pub q: i32,
    pub ep: f64,
    pub grad_norm: f64,
    /// Ascending.
    pub hessian_eigenvalues: Vec<f64>,
    pub zero_count: usize,
    pub zero_tol: f64,
    pub classification: Classification,
    /// Reference eigenvalue divided by the most negative computed one, when a
    /// reference was supplied.
    pub scale_factor: Option<f64>,
}

impl CriticalityReport {
    /// Distinct eigenvalues with multiplicities, grouped within `tol`.
    pub fn degeneracies(&self, tol: f64) -> Vec<(f64, usize)> {
        let mut groups: Vec<(f64, usize)> = Vec::new();
        for &e in &self.hessian_eigenvalues {
            let v = if e.abs() < self.zero_tol { 0.0 } else { e };
            match groups.last_mut() {
                Some((g, n)) if (v - *g).abs() <= tol * g.abs().max(1.0) => *n += 1,
                _ => groups.push((v, 1)),
            }
        }
        groups
    }
}

pub const DEFAULT_ZERO_TOL: f64 = 1e-7;

pub fn certify(u: &UnitaryGate, q: i32, grad_tol: f64) -> Result<CriticalityReport> {
    certify_with(u, q, grad_tol, DEFAULT_ZERO_TOL, None)
}

/// Gradient norm, Hessian spectrum and classification. `reference` is an
/// expected most-negative eigenvalue in some other normalization.
pub fn certify_with(u: &UnitaryGate, q: i32, grad_tol: f64, zero_tol: f64, reference: Option<f64>) -> Result<CriticalityReport> {
    let grad = ep_gradient(u, q)?;
    let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    let h = ep_hessian(u, q)?;
    let mut eig: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let zero_count = eig.iter().filter(|e| e.abs() < zero_tol).count();
    let neg = eig.iter().filter(|e| **e <= -zero_tol).count();
    let pos = eig.iter().filter(|e| **e >= zero_tol).count();
    let classification = if grad_norm > grad_tol || neg + pos == 0 {
        Classification::Inconclusive
    } else if pos == 0 {
        Classification::Max
    } else if neg == 0 {
        Classification::Min
    } else {
        Classification::Saddle
    };
    let scale_factor = reference.and_then(|r| eig.first().filter(|e| e.abs() >= zero_tol).map(|e| r / e));
    Ok(CriticalityReport {
        j: u.j(),
        q,
        ep: crate::geometry::ep_geometric(u, q)?,
        grad_norm,
        hessian_eigenvalues: eig,
        zero_count,
        zero_tol,
        classification,
        scale_factor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::KnownGate;
    use crate::geometry::ep_geometric;
    use crate::haar::haar_unitary;
    use crate::linalg::{hermitian_exp_i, trace_product};

    fn moved(u: &UnitaryGate, coeffs: &[f64]) -> UnitaryGate {
        let d = u.j().dim();
        let step = hermitian_exp_i(&generator_combination(d, coeffs), 1.0);
        UnitaryGate::from_matrix(u.j(), step * u.matrix()).unwrap()
    }

    #[test]
    fn gell_mann_orthonormal_traceless() {
        for d in 2..=5 {
            let g = gell_mann(d);
            assert_eq!(g.len(), d * d - 1);
            for a in 0..g.len() {
                assert!(g[a].trace().norm() < 1e-14);
                for b in 0..g.len() {
                    let t = trace_product(&g[a], &g[b]);
                    let expected = if a == b { 2.0 } else { 0.0 };
                    assert!((t - re(expected)).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let u = haar_unitary(4, 3).unwrap();
        let g = ep_gradient(&u, 1).unwrap();
        let eps = 1e-5;
        for a in 0..g.len() {
            let mut e = vec![0.0; g.len()];
            e[a] = eps;
            let plus = ep_geometric(&moved(&u, &e), 1).unwrap();
            e[a] = -eps;
            let minus = ep_geometric(&moved(&u, &e), 1).unwrap();
            assert!(((plus - minus) / (2.0 * eps) - g[a]).abs() < 1e-6, "component {a}");
        }
    }

    #[test]
    fn gradient_vanishes_at_rotations_and_optimum() {
        let r = UnitaryGate::rotation(HalfInt::from_twice(3), 0.3, 1.0, 2.0);
        assert!(ep_gradient(&r, 1).unwrap().iter().all(|g| g.abs() < 1e-10));
        let u0 = KnownGate::J1Omega.gate();
        assert!(ep_gradient(&u0, 1).unwrap().iter().all(|g| g.abs() < 1e-10));
    }

    #[test]
    fn hessian_matches_second_differences_at_optimum() {
        let u = KnownGate::J32Opt.gate();
        let h = ep_hessian(&u, 1).unwrap();
        let n = h.nrows();
        let eps = 1e-4;
        let f0 = ep_geometric(&u, 1).unwrap();
        let f = |coeffs: &[f64]| ep_geometric(&moved(&u, coeffs), 1).unwrap();
        for (a, b) in [(0, 0), (3, 3), (0, 5), (2, 14), (14, 14), (7, 9)] {
            let mut e = vec![0.0; n];
            let fd = if a == b {
                e[a] = eps;
                let p = f(&e);
                e[a] = -eps;
                (p - 2.0 * f0 + f(&e)) / (eps * eps)
            } else {
                let mut s = |sa: f64, sb: f64| {
                    e.iter_mut().for_each(|x| *x = 0.0);
                    e[a] = sa * eps;
                    e[b] = sb * eps;
                    f(&e)
                };
                (s(1.0, 1.0) - s(1.0, -1.0) - s(-1.0, 1.0) + s(-1.0, -1.0)) / (4.0 * eps * eps)
            };
            assert!((fd - h[(a, b)]).abs() < 1e-5, "({a},{b}): {fd} vs {}", h[(a, b)]);
        }
    }

    #[test]
    fn spin_one_pattern() {
        let r = certify(&KnownGate::J1Omega.gate(), 1, 1e-9).unwrap();
        assert_eq!(r.classification, Classification::Max);
        let groups = r.degeneracies(1e-8);
        assert_eq!(groups.len(), 2, "{groups:?}");
        assert_eq!(groups[0].1, 2);
        assert_eq!(groups[1], (0.0, 6));
    }

    #[test]
    fn spin_three_halves_pattern() {
        let r = certify_with(&KnownGate::J32Opt.gate(), 1, 1e-9, DEFAULT_ZERO_TOL, Some(-8.0)).unwrap();
        let groups = r.degeneracies(1e-8);
        assert_eq!(groups.iter().map(|g| g.1).collect::<Vec<_>>(), vec![4, 5, 6], "{groups:?}");
        assert!((groups[0].0 / groups[1].0 - 5.0).abs() < 1e-9);
        assert!(r.scale_factor.is_some());
    }
}
