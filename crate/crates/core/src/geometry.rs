//! SU(2)-invariant geometry of a gate: invariant vectors, the `Û` matrix,
//! the inner-product form of the entangling power and its side constraints.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::angular::wigner_d;
use crate::error::{domain, Result, SpinError};
use crate::halfint::HalfInt;
use crate::linalg::{c, kron, re, trace_product, unitarity_deviation, CMatrix};
use crate::operators::{basis_transform_tp, m_block_eigenvalues, space, PairOperator, SpinOperator};

/// Default unitarity tolerance for [`UnitaryGate::new`].
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    /// Normalized projectors `P_L / sqrt(2L+1)`.
    P,
    /// Normalized pair multipoles `𝒯_σ / sqrt(2σ+1)`.
    T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantVector {
    pub j: HalfInt,
    pub basis: Basis,
    pub components: Vec<f64>,
}

impl InvariantVector {
    /// Plain Euclidean product; the normalized bases are orthonormal.
    pub fn dot(&self, other: &InvariantVector) -> f64 {
        self.components.iter().zip(&other.components).map(|(a, b)| a * b).sum()
    }
}

/// A unitary on `H(j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryGate {
    op: SpinOperator,
}

impl UnitaryGate {
    pub fn new(op: SpinOperator) -> Result<Self> {
        Self::with_tolerance(op, UNITARY_TOL)
    }

    pub fn with_tolerance(op: SpinOperator, tol: f64) -> Result<Self> {
        let deviation = unitarity_deviation(op.matrix());
        if deviation > tol {
            return Err(SpinError::NotUnitary { deviation });
        }
        Ok(UnitaryGate { op })
    }

    pub fn from_matrix(j: HalfInt, matrix: CMatrix) -> Result<Self> {
        Self::new(SpinOperator::new(j, matrix)?)
    }

    pub fn identity(j: HalfInt) -> Self {
        UnitaryGate { op: SpinOperator::new(j, CMatrix::identity(j.dim(), j.dim())).unwrap() }
    }

    /// The spin-j image of the zyz rotation `(α, β, γ)`.
    pub fn rotation(j: HalfInt, alpha: f64, beta: f64, gamma: f64) -> Self {
        UnitaryGate { op: wigner_d(j, alpha, beta, gamma) }
    }

    pub fn j(&self) -> HalfInt {
        self.op.j()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn operator(&self) -> &SpinOperator {
        &self.op
    }

    pub fn adjoint(&self) -> Self {
        UnitaryGate { op: self.op.adjoint() }
    }

    /// `self · other`.
    pub fn then_after(&self, other: &UnitaryGate) -> Self {
        assert_eq!(self.j(), other.j(), "spin mismatch in gate product");
        UnitaryGate { op: SpinOperator::new(self.j(), self.matrix() * other.matrix()).unwrap() }
    }

    /// `U ⊗ U`.
    pub fn doubled(&self) -> PairOperator {
        PairOperator::doubled(&self.op)
    }
}

fn check_q(j: HalfInt, q: i32) -> Result<()> {
    if q < 1 || q > j.floor() {
        return domain(format!("bipartition q = {q} outside 1..=⌊j⌋ for j = {j}"));
    }
    Ok(())
}

/// Components `Tr(V B̃_k)` of a pair operator in the chosen basis.
pub fn invariant_vector(v: &PairOperator, basis: Basis) -> InvariantVector {
    let j = v.j();
    let sp = space(j);
    let ops = match basis {
        Basis::P => &sp.projectors,
        Basis::T => &sp.pair_multipoles,
    };
    let components = ops
        .iter()
        .enumerate()
        .map(|(k, b)| trace_product(v.matrix(), b).re / ((2 * k + 1) as f64).sqrt())
        .collect();
    InvariantVector { j, basis, components }
}

/// Same as [`invariant_vector`] for a raw matrix that still needs a size check.
pub fn invariant_vector_of(j: HalfInt, v: &CMatrix, basis: Basis) -> Result<InvariantVector> {
    Ok(invariant_vector(&PairOperator::new(j, v.clone())?, basis))
}

/// `S[n][m] = Tr(𝒰 P_m 𝒰† P_n)`, computed from `𝒰` in the coupled basis.
fn projector_overlaps(u: &UnitaryGate) -> DMatrix<f64> {
    let sp = space(u.j());
    let g = sp.coupled_basis.adjoint() * kron(u.matrix(), u.matrix()) * &sp.coupled_basis;
    let nb = sp.n_blocks();
    DMatrix::from_fn(nb, nb, |n, m| {
        let mut acc = 0.0;
        for a in sp.block_range(n) {
            for b in sp.block_range(m) {
                acc += g[(a, b)].norm_sqr();
            }
        }
        acc
    })
}

/// Real `(2j+1)×(2j+1)` matrix with entry `(n, m) = Tr(𝒰 B̃_m 𝒰† B̃_n)`, so
/// that `Û · V→` is the invariant vector of `𝒰 V 𝒰†`.
pub fn uhat(u: &UnitaryGate, basis: Basis) -> DMatrix<f64> {
    let s = projector_overlaps(u);
    let raw = match basis {
        Basis::P => s,
        Basis::T => {
            let a = basis_transform_tp(u.j()).t_in_p;
            &a * s * a.transpose()
        }
    };
    DMatrix::from_fn(raw.nrows(), raw.ncols(), |n, m| raw[(n, m)] / (((2 * n + 1) * (2 * m + 1)) as f64).sqrt())
}

/// `Û 𝒩→`: components `p_L = Tr(𝒰 𝒩 𝒰† P̃_L)`.
pub fn transformed_n(u: &UnitaryGate, basis: Basis) -> InvariantVector {
    let j = u.j();
    let sp = space(j);
    let coeff = sp.coupled_basis.adjoint() * (kron(u.matrix(), u.matrix()) * &sp.top_block);
    let norm = sp.top_block.ncols() as f64;
    let weights: Vec<f64> = (0..sp.n_blocks())
        .map(|l| sp.block_range(l).map(|a| coeff.row(a).iter().map(|z| z.norm_sqr()).sum::<f64>()).sum::<f64>() / norm)
        .collect();
    let components = match basis {
        Basis::P => weights.iter().enumerate().map(|(l, w)| w / ((2 * l + 1) as f64).sqrt()).collect(),
        Basis::T => {
            let a = basis_transform_tp(j).t_in_p;
            (0..weights.len())
                .map(|s| (0..weights.len()).map(|l| a[(s, l)] * weights[l]).sum::<f64>() / ((2 * s + 1) as f64).sqrt())
                .collect()
        }
    };
    InvariantVector { j, basis, components }
}

/// `𝓜→_q` in the P basis: block eigenvalue times `sqrt(2L+1)`.
pub fn m_vector(j: HalfInt, q: i32) -> Result<InvariantVector> {
    let eig = m_block_eigenvalues(j, q)?;
    let components = eig.iter().enumerate().map(|(l, e)| e * ((2 * l + 1) as f64).sqrt()).collect();
    Ok(InvariantVector { j, basis: Basis::P, components })
}

/// `e_p = 1 − <Û𝒩→, 𝓜→_q>`.
pub fn ep_geometric(u: &UnitaryGate, q: i32) -> Result<f64> {
    let m = m_vector(u.j(), q)?;
    Ok(1.0 - transformed_n(u, Basis::P).dot(&m))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperplaneResiduals {
    /// `|Σ sqrt(2L+1) (Û𝒩→)_L − 1|` over `L ≡ 2j (mod 2)`.
    pub n_plane: f64,
    /// `|Σ sqrt(2L+1) (Û𝓜→_q)_L − (j+1)(2j+1)/(2j+1−q)|` over `L ≡ 2j (mod 2)`.
    pub m_plane: f64,
    /// `|Σ sqrt(2σ+1) (Û𝓜→_q)^T_σ − 2(j+1)(2j+1)/(2j+1−q)|`.
    pub m_plane_t: f64,
}

impl HyperplaneResiduals {
    pub fn max(&self) -> f64 {
        self.n_plane.max(self.m_plane).max(self.m_plane_t)
    }
}

/// `(j+1)(2j+1)/(2j+1−q)`.
pub fn m_plane_target(j: HalfInt, q: i32) -> f64 {
    let jv = j.value();
    (jv + 1.0) * (2.0 * jv + 1.0) / (2.0 * jv + 1.0 - f64::from(q))
}

pub fn hyperplane_residuals(u: &UnitaryGate, q: i32) -> Result<HyperplaneResiduals> {
    let j = u.j();
    let mv = m_vector(j, q)?;
    let parity = j.twice() % 2;
    let n_vec = transformed_n(u, Basis::P);
    let n_sum: f64 = n_vec
        .components
        .iter()
        .enumerate()
        .filter(|(l, _)| (*l as i32) % 2 == parity)
        .map(|(l, p)| ((2 * l + 1) as f64).sqrt() * p)
        .sum();
    let up = uhat(u, Basis::P);
    let um = &up * DMatrix::from_column_slice(mv.components.len(), 1, &mv.components);
    let m_sum: f64 = (0..um.nrows())
        .filter(|l| (*l as i32) % 2 == parity)
        .map(|l| ((2 * l + 1) as f64).sqrt() * um[(l, 0)])
        .sum();
    let a = basis_transform_tp(j).t_in_p;
    let nb = um.nrows();
    let t_sum: f64 = (0..nb)
        .map(|s| {
            // (Û𝓜→)^T_σ · sqrt(2σ+1) = Tr(𝒰𝓜𝒰† 𝒯_σ)
            (0..nb).map(|l| a[(s, l)] * ((2 * l + 1) as f64).sqrt() * um[(l, 0)]).sum::<f64>()
        })
        .sum();
    let target = m_plane_target(j, q);
    Ok(HyperplaneResiduals {
        n_plane: (n_sum - 1.0).abs(),
        m_plane: (m_sum - target).abs(),
        m_plane_t: (t_sum - 2.0 * target).abs(),
    })
}

/// Hand-reduced formulas for `j ∈ {1, 3/2, 2}` in terms of one or two
/// components of `Û𝒩→`.
pub fn ep_closed_small(u: &UnitaryGate, q: i32) -> Result<f64> {
    let j = u.j();
    check_q(j, q)?;
    let p = transformed_n(u, Basis::P).components;
    match j.twice() {
        2 => Ok(3.0 * p[0]),
        3 => Ok(20.0 * 3f64.sqrt() / 9.0 * p[1]),
        4 => Ok(0.25 * (10.0 * p[0] / f64::from(q) + 7.0 * 5f64.sqrt() * p[2])),
        _ => domain(format!("no closed form for j = {j}")),
    }
}

/// The antidiagonal `Φ` of the spin-1 trace formula.
pub fn phi_j1() -> CMatrix {
    let mut phi = CMatrix::zeros(3, 3);
    phi[(0, 2)] = re(-1.0);
    phi[(1, 1)] = re(1.0);
    phi[(2, 0)] = re(-1.0);
    phi
}

/// Spin-1 entangling power from `3/5 (1 − |Tr(Φ Uᵀ Φ U)|² / 9)`.
pub fn ep_j1_trace_form(u: &UnitaryGate) -> Result<f64> {
    if u.j().twice() != 2 {
        return domain(format!("trace form needs j = 1, got {}", u.j()));
    }
    let phi = phi_j1();
    let t = (&phi * u.matrix().transpose() * &phi * u.matrix()).trace();
    Ok(0.6 * (1.0 - t.norm_sqr() / 9.0))
}

/// Nonlocal factor `A(c)` of the spin-1 Cartan decomposition and its
/// entangling power `4/15 (sin²c12 + sin²c13 + sin²c23)`.
pub fn cartan_j1(c1: f64, c2: f64, c3: f64) -> Result<(UnitaryGate, f64)> {
    if (c1 + c2 + c3).abs() > 1e-12 {
        return domain(format!("Cartan parameters must sum to zero, got {}", c1 + c2 + c3));
    }
    let phase = |x: f64| c(0.0, 0.5 * x).exp();
    let l1 = phase(-c1 + c2 + c3);
    let l2 = phase(c1 + c2 - c3);
    let l3 = phase(c1 - c2 + c3);
    let mut a = CMatrix::zeros(3, 3);
    a[(0, 0)] = (l1 + l3) * 0.5;
    a[(0, 2)] = (l1 - l3) * 0.5;
    a[(2, 0)] = (l1 - l3) * 0.5;
    a[(2, 2)] = (l1 + l3) * 0.5;
    a[(1, 1)] = l2;
    let gate = UnitaryGate::from_matrix(HalfInt::ONE, a)?;
    let s2 = |x: f64| x.sin().powi(2);
    let ep = 4.0 / 15.0 * (s2(c1 - c2) + s2(c1 - c3) + s2(c2 - c3));
    Ok((gate, ep))
}

/// `e_p(U) − e_p(U†)`.
pub fn dagger_gap(u: &UnitaryGate, q: i32) -> Result<f64> {
    Ok(ep_geometric(u, q)? - ep_geometric(&u.adjoint(), q)?)
}
