//! Schmidt numbers of two-spin states.
//!
//! Pair states are vectors of length `(2j+1)²` indexed `i1·(2j+1) + i2`,
//! matching [`crate::operators::PairOperator`].

use crate::error::{domain, Result, SpinError};
use crate::geometry::UnitaryGate;
use crate::halfint::HalfInt;
use crate::linalg::{kron, CMatrix, CVector};
use crate::operators::coupled_state;

const NORM_TOL: f64 = 1e-10;

fn check_pair(j: HalfInt, psi: &CVector) -> Result<()> {
    let d = j.dim();
    if psi.len() != d * d {
        return Err(SpinError::DimensionMismatch { expected: d * d, got: psi.len() });
    }
    let n = psi.norm();
    if (n - 1.0).abs() > NORM_TOL {
        return domain(format!("pair state has norm {n}, expected 1"));
    }
    Ok(())
}

/// `C[(i1, i2)] = ⟨i1, i2|ψ⟩`.
pub fn coefficient_matrix(j: HalfInt, psi: &CVector) -> Result<CMatrix> {
    let d = j.dim();
    if psi.len() != d * d {
        return Err(SpinError::DimensionMismatch { expected: d * d, got: psi.len() });
    }
    Ok(CMatrix::from_fn(d, d, |a, b| psi[a * d + b]))
}

/// Singular values of the coefficient matrix, descending.
pub fn schmidt_of(j: HalfInt, psi: &CVector) -> Result<Vec<f64>> {
    check_pair(j, psi)?;
    let mut s: Vec<f64> = coefficient_matrix(j, psi)?.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(s)
}

/// Schmidt numbers of the coupled state `|j, j, L, M⟩`, descending.
pub fn schmidt_spectrum(j: HalfInt, l: HalfInt, m: HalfInt) -> Result<Vec<f64>> {
    schmidt_of(j, &coupled_state(j, l, m)?)
}

/// `|⟨dst|(U⊗U)|src⟩|`.
pub fn schmidt_transport_check(j: HalfInt, u: &UnitaryGate, src: &CVector, dst: &CVector) -> Result<f64> {
    if u.j() != j {
        return Err(SpinError::DimensionMismatch { expected: j.dim(), got: u.j().dim() });
    }
    check_pair(j, src)?;
    check_pair(j, dst)?;
    let moved = kron(u.matrix(), u.matrix()) * src;
    Ok(dst.dotc(&moved).norm())
}

/// Normalized linear entropy `d/(d−1)·(1 − Σ s_k⁴)` across the two spins.
pub fn pair_linear_entropy(j: HalfInt, psi: &CVector) -> Result<f64> {
    let s = schmidt_of(j, psi)?;
    let d = j.dim() as f64;
    Ok(d / (d - 1.0) * (1.0 - s.iter().map(|x| x.powi(4)).sum::<f64>()))
}

/// Largest difference between two descending spectra.
pub fn spectrum_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::KnownGate;
    use crate::haar::haar_unitary;
    use crate::linalg::re;

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && spectrum_distance(a, b) < tol
    }

    #[test]
    fn spin_one_singlet() {
        let s = schmidt_spectrum(HalfInt::ONE, HalfInt::ZERO, HalfInt::ZERO).unwrap();
        assert!(close(&s, &[1.0 / 3f64.sqrt(); 3], 1e-12), "{s:?}");
    }

    #[test]
    fn spin_three_halves_triplet() {
        let r10 = 10f64.sqrt();
        let expect = [2.0 / r10, 3f64.sqrt() / r10, 3f64.sqrt() / r10, 0.0];
        for m in [-1, 1] {
            let s = schmidt_spectrum(h(3), HalfInt::ONE, HalfInt::integer(m)).unwrap();
            assert!(close(&s, &expect, 1e-12), "{s:?}");
        }
        let r = 2.0 * 5f64.sqrt();
        let s = schmidt_spectrum(h(3), HalfInt::ONE, HalfInt::ZERO).unwrap();
        assert!(close(&s, &[3.0 / r, 3.0 / r, 1.0 / r, 1.0 / r], 1e-12), "{s:?}");
    }

    #[test]
    fn squares_sum_to_one() {
        for tj in 1..=5 {
            for l in 0..=tj {
                let s = schmidt_spectrum(h(tj), HalfInt::integer(l), HalfInt::ZERO).unwrap();
                assert!((s.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn permutation_gate_transport() {
        let j = HalfInt::ONE;
        let src = (coupled_state(j, HalfInt::integer(2), HalfInt::ONE).unwrap() * re(2f64.sqrt())
            - coupled_state(j, HalfInt::integer(2), HalfInt::integer(-2)).unwrap())
            * re(1.0 / 3f64.sqrt());
        let dst = coupled_state(j, HalfInt::ZERO, HalfInt::ZERO).unwrap();
        let v = schmidt_transport_check(j, &KnownGate::J1Perm.gate(), &src, &dst).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
        assert!(close(&schmidt_of(j, &src).unwrap(), &schmidt_of(j, &dst).unwrap(), 1e-12));
    }

    #[test]
    fn spin_three_halves_transport() {
        let j = h(3);
        let src = coupled_state(j, HalfInt::integer(3), HalfInt::ZERO).unwrap();
        let dst = coupled_state(j, HalfInt::ONE, HalfInt::ZERO).unwrap();
        let v = schmidt_transport_check(j, &KnownGate::J32Opt.gate(), &src, &dst).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn spin_three_halves_side_transports() {
        let j = h(3);
        let u = KnownGate::J32Opt.gate();
        for s in [1, -1] {
            let a = coupled_state(j, h(6), h(-4 * s)).unwrap();
            let b = coupled_state(j, h(6), h(6 * s)).unwrap();
            let src = a * re(0.6f64.sqrt()) + b * crate::linalg::c(0.0, 0.4f64.sqrt());
            let dst = coupled_state(j, HalfInt::ONE, HalfInt::integer(-s)).unwrap();
            assert!((schmidt_transport_check(j, &u, &src, &dst).unwrap() - 1.0).abs() < 1e-10);
            assert!(close(&schmidt_of(j, &src).unwrap(), &schmidt_of(j, &dst).unwrap(), 1e-12));
        }
    }

    #[test]
    fn unequal_spectra_cannot_transport() {
        let j = h(3);
        let src = coupled_state(j, HalfInt::integer(3), HalfInt::integer(3)).unwrap();
        let dst = coupled_state(j, HalfInt::ONE, HalfInt::ZERO).unwrap();
        for seed in 0..10 {
            let u = haar_unitary(4, seed).unwrap();
            assert!(schmidt_transport_check(j, &u, &src, &dst).unwrap() < 1.0 - 1e-6);
        }
    }

    #[test]
    fn entropy_of_triplet() {
        let psi = coupled_state(h(3), HalfInt::ONE, HalfInt::ONE).unwrap();
        // Γ = (√3, √3, 2, 0)/√10, Σ Γ⁴ = (9 + 9 + 16)/100
        let expected = 4.0 / 3.0 * (1.0 - 0.34);
        assert!((pair_linear_entropy(h(3), &psi).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_states() {
        let j = HalfInt::ONE;
        assert!(schmidt_of(j, &CVector::zeros(4)).is_err());
        assert!(schmidt_of(j, &CVector::zeros(9)).is_err());
    }
}
