//! Operators on a single spin-j space and on the two-copy space `H(j) ⊗ H(j)`.
//!
//! Pair operators use the row-major product basis `|m1> ⊗ |m2>` with both
//! projections descending, i.e. index `i1 * (2j+1) + i2`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

use crate::angular::{clebsch_gordan, wigner_6j};
use crate::error::{domain, Result, SpinError};
use crate::halfint::HalfInt;
use crate::linalg::{kron, re, CMatrix, CVector};

/// Dense operator on `H(j)`, dimension `2j+1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinOperator {
    j: HalfInt,
    matrix: CMatrix,
}

impl SpinOperator {
    pub fn new(j: HalfInt, matrix: CMatrix) -> Result<Self> {
        let d = j.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(SpinError::DimensionMismatch { expected: d, got: matrix.nrows() });
        }
        Ok(SpinOperator { j, matrix })
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> SpinOperator {
        SpinOperator { j: self.j, matrix: self.matrix.adjoint() }
    }
}

/// Dense operator on `H(j) ⊗ H(j)`, dimension `(2j+1)^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairOperator {
    j: HalfInt,
    matrix: CMatrix,
}

impl PairOperator {
    pub fn new(j: HalfInt, matrix: CMatrix) -> Result<Self> {
        let d = j.dim() * j.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(SpinError::DimensionMismatch { expected: d, got: matrix.nrows() });
        }
        Ok(PairOperator { j, matrix })
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `U ⊗ U` acting on the two-copy space.
    pub fn doubled(u: &SpinOperator) -> PairOperator {
        PairOperator { j: u.j, matrix: kron(&u.matrix, &u.matrix) }
    }
}

fn check_spin(j: HalfInt) -> Result<()> {
    if j.twice() < 1 {
        return domain(format!("spin must be positive, got {j}"));
    }
    Ok(())
}

fn check_coupled(j: HalfInt, l: HalfInt) -> Result<()> {
    check_spin(j)?;
    if !l.is_integer() || l.twice() < 0 || l.twice() > 2 * j.twice() {
        return domain(format!("total spin {l} outside 0..=2j for j = {j}"));
    }
    Ok(())
}

fn check_q(j: HalfInt, q: i32) -> Result<()> {
    check_spin(j)?;
    if q < 1 || q > j.floor() {
        return domain(format!("bipartition q = {q} outside 1..=⌊j⌋ for j = {j}"));
    }
    Ok(())
}

/// `|j, j, L, M>` expanded in the product basis.
pub fn coupled_state(j: HalfInt, l: HalfInt, m: HalfInt) -> Result<CVector> {
    check_coupled(j, l)?;
    if !l.admits(m) {
        return domain(format!("projection {m} invalid for L = {l}"));
    }
    Ok(coupled_state_unchecked(j, l, m))
}

fn coupled_state_unchecked(j: HalfInt, l: HalfInt, m: HalfInt) -> CVector {
    let ms: Vec<HalfInt> = j.projections().collect();
    let d = ms.len();
    CVector::from_fn(d * d, |idx, _| {
        let (m1, m2) = (ms[idx / d], ms[idx % d]);
        re(clebsch_gordan(j, m1, j, m2, l, m))
    })
}

/// Multipole operator `T_{σμ}` on `H(j)`, orthonormal under `Tr(A† B)`.
pub fn multipole(j: HalfInt, sigma: HalfInt, mu: HalfInt) -> Result<SpinOperator> {
    check_coupled(j, sigma)?;
    if !sigma.admits(mu) {
        return domain(format!("projection {mu} invalid for rank {sigma}"));
    }
    Ok(multipole_unchecked(j, sigma, mu))
}

fn multipole_unchecked(j: HalfInt, sigma: HalfInt, mu: HalfInt) -> SpinOperator {
    let ms: Vec<HalfInt> = j.projections().collect();
    let norm = ((sigma.twice() + 1) as f64 / (j.twice() + 1) as f64).sqrt();
    let matrix = CMatrix::from_fn(ms.len(), ms.len(), |r, c| re(norm * clebsch_gordan(j, ms[c], sigma, mu, j, ms[r])));
    SpinOperator { j, matrix }
}

/// Cached operator zoo for one spin value.
pub struct SpinSpace {
    pub j: HalfInt,
    /// `T_σμ` for `σ = 0..=2j`, `μ = σ, ..., -σ`.
    pub multipoles: Vec<Vec<CMatrix>>,
    /// `P_L` for `L = 0..=2j`.
    pub projectors: Vec<CMatrix>,
    /// `𝒯_σ = Σ_μ T_σμ ⊗ T_σμ†` for `σ = 0..=2j`.
    pub pair_multipoles: Vec<CMatrix>,
    /// Coupled basis as columns, grouped by `L = 0..=2j` with `M` descending;
    /// block `L` occupies columns `L^2 .. (L+1)^2`.
    pub coupled_basis: CMatrix,
    /// Columns of the `L = 2j` block, `M = 2j, ..., -2j`.
    pub top_block: CMatrix,
    m_ops: Mutex<HashMap<i32, Arc<CMatrix>>>,
}

impl SpinSpace {
    fn build(j: HalfInt) -> SpinSpace {
        let d = j.dim();
        let n_l = j.twice() as usize + 1;
        let mut projectors = Vec::with_capacity(n_l);
        for l in 0..n_l as i32 {
            let lh = HalfInt::integer(l);
            let mut p = CMatrix::zeros(d * d, d * d);
            for m in lh.projections() {
                let v = coupled_state_unchecked(j, lh, m);
                p += &v * v.adjoint();
            }
            projectors.push(p);
        }
        let multipoles: Vec<Vec<CMatrix>> = (0..n_l as i32)
            .map(|s| {
                let sh = HalfInt::integer(s);
                sh.projections().map(|mu| multipole_unchecked(j, sh, mu).matrix).collect()
            })
            .collect();
        let pair_multipoles = multipoles
            .iter()
            .map(|ts| ts.iter().fold(CMatrix::zeros(d * d, d * d), |acc, t| acc + kron(t, &t.adjoint())))
            .collect();
        let cols: Vec<CVector> = (0..n_l as i32)
            .flat_map(|l| {
                let lh = HalfInt::integer(l);
                lh.projections().map(move |m| coupled_state_unchecked(j, lh, m))
            })
            .collect();
        let coupled_basis = CMatrix::from_columns(&cols);
        let top_start = (n_l - 1) * (n_l - 1);
        let top_block = coupled_basis.columns(top_start, d * d - top_start).into_owned();
        SpinSpace { j, multipoles, projectors, pair_multipoles, coupled_basis, top_block, m_ops: Mutex::new(HashMap::new()) }
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    /// Column range of block `L` in [`SpinSpace::coupled_basis`].
    pub fn block_range(&self, l: usize) -> std::ops::Range<usize> {
        l * l..(l + 1) * (l + 1)
    }

    /// Number of coupled blocks, `2j + 1`.
    pub fn n_blocks(&self) -> usize {
        self.projectors.len()
    }

    /// `𝓜_q` assembled from the projectors.
    pub fn operator_m(&self, q: i32) -> Result<Arc<CMatrix>> {
        check_q(self.j, q)?;
        if let Some(m) = self.m_ops.lock().unwrap().get(&q) {
            return Ok(Arc::clone(m));
        }
        let eig = m_block_eigenvalues(self.j, q)?;
        let mut acc = CMatrix::zeros(self.projectors[0].nrows(), self.projectors[0].ncols());
        for (p, &w) in self.projectors.iter().zip(&eig) {
            acc += p * re(w);
        }
        let arc = Arc::new(acc);
        self.m_ops.lock().unwrap().insert(q, Arc::clone(&arc));
        Ok(arc)
    }

    /// `𝒩 = P_{2j} / (4j+1)`.
    pub fn operator_n(&self) -> CMatrix {
        let top = self.projectors.last().unwrap();
        top * re(1.0 / (2 * self.j.twice() + 1) as f64)
    }
}

/// Shared, lazily built [`SpinSpace`] for `j`.
pub fn space(j: HalfInt) -> Arc<SpinSpace> {
    static CACHE: OnceLock<Mutex<HashMap<i32, Arc<SpinSpace>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().unwrap().get(&j.twice()) {
        return Arc::clone(s);
    }
    let built = Arc::new(SpinSpace::build(j));
    Arc::clone(cache.lock().unwrap().entry(j.twice()).or_insert(built))
}

pub fn projector_l(j: HalfInt, l: HalfInt) -> Result<PairOperator> {
    check_coupled(j, l)?;
    Ok(PairOperator { j, matrix: space(j).projectors[l.as_integer() as usize].clone() })
}

pub fn pair_multipole(j: HalfInt, sigma: HalfInt) -> Result<PairOperator> {
    check_coupled(j, sigma)?;
    Ok(PairOperator { j, matrix: space(j).pair_multipoles[sigma.as_integer() as usize].clone() })
}

/// Swap `F |a>|b> = |b>|a>`.
pub fn swap(j: HalfInt) -> PairOperator {
    let d = j.dim();
    let matrix = CMatrix::from_fn(d * d, d * d, |r, c| {
        let (a, b) = (c / d, c % d);
        if r == b * d + a {
            re(1.0)
        } else {
            re(0.0)
        }
    });
    PairOperator { j, matrix }
}

/// `χ(q, j, L)`: the 6-j weighted sum that sets the block eigenvalues of `𝓜_q`.
pub fn chi(q: i32, j: HalfInt, l: i32) -> f64 {
    let hq = HalfInt::from_twice(q);
    let top = HalfInt::from_twice(2 * j.twice());
    (1..=q)
        .map(|s| {
            let sh = HalfInt::integer(s);
            let num = wigner_6j(hq, hq, HalfInt::integer(q), hq, hq, sh) * wigner_6j(j, j, HalfInt::integer(l), j, j, sh);
            f64::from(2 * s + 1) * num / wigner_6j(j, j, top, j, j, sh)
        })
        .sum()
}

/// Eigenvalue of `𝓜_q` on each block `P_L`, `L = 0..=2j`.
pub fn m_block_eigenvalues(j: HalfInt, q: i32) -> Result<Vec<f64>> {
    check_q(j, q)?;
    let pref = f64::from(q + 1) / f64::from(q);
    Ok((0..=j.twice())
        .map(|l| {
            let sign = if (j.twice() + l) % 2 == 0 { 1.0 } else { -1.0 };
            pref * sign * chi(q, j, l)
        })
        .collect())
}

/// `𝓜_q` as a combination of the projectors `P_L`.
pub fn operator_m(j: HalfInt, q: i32) -> Result<PairOperator> {
    let m = space(j).operator_m(q)?;
    Ok(PairOperator { j, matrix: (*m).clone() })
}

/// `𝓜_q` from the 6-j weighted sum of the pair multipoles `𝒯_σ`.
pub fn operator_m_from_multipoles(j: HalfInt, q: i32) -> Result<PairOperator> {
    check_q(j, q)?;
    let sp = space(j);
    let hq = HalfInt::from_twice(q);
    let top = HalfInt::from_twice(2 * j.twice());
    let mut acc = CMatrix::zeros(sp.projectors[0].nrows(), sp.projectors[0].ncols());
    for s in 1..=q {
        let sh = HalfInt::integer(s);
        let w = wigner_6j(hq, hq, HalfInt::integer(q), hq, hq, sh) / wigner_6j(j, j, top, j, j, sh);
        acc += &sp.pair_multipoles[s as usize] * re(w);
    }
    acc *= re(f64::from(q + 1) / f64::from(q));
    Ok(PairOperator { j, matrix: acc })
}

/// `𝓜_q` from the factorial weights that come out of the reduced-state
/// multipole scaling.
pub fn operator_m_from_factorials(j: HalfInt, q: i32) -> Result<PairOperator> {
    check_q(j, q)?;
    let sp = space(j);
    let tj = j.twice();
    let lf = |n: i32| -> f64 { (1..=n).map(|k| f64::from(k).ln()).sum() };
    let mut acc = CMatrix::zeros(sp.projectors[0].nrows(), sp.projectors[0].ncols());
    for s in 1..=q {
        let log_w = lf(q).mul_add(2.0, -2.0 * lf(tj)) + lf(tj - s) + lf(tj + s + 1) - lf(q - s) - lf(q + s + 1);
        acc += &sp.pair_multipoles[s as usize] * re(log_w.exp());
    }
    acc *= re(f64::from(q + 1) / f64::from(q));
    Ok(PairOperator { j, matrix: acc })
}

pub fn operator_n(j: HalfInt) -> PairOperator {
    PairOperator { j, matrix: space(j).operator_n() }
}

/// Coefficients relating the pair multipoles and the projectors.
#[derive(Clone, Debug)]
pub struct TpTransform {
    /// Row `σ`: coefficients of `𝒯_σ` in the `P_L` basis.
    pub t_in_p: DMatrix<f64>,
    /// Row `L`: coefficients of `P_L` in the `𝒯_σ` basis.
    pub p_in_t: DMatrix<f64>,
}

pub fn basis_transform_tp(j: HalfInt) -> TpTransform {
    let n = j.twice() as usize + 1;
    let sign = |l: usize| if (j.twice() + l as i32) % 2 == 0 { 1.0 } else { -1.0 };
    let six = |a: usize, b: usize| wigner_6j(j, j, HalfInt::integer(a as i32), j, j, HalfInt::integer(b as i32));
    let t_in_p = DMatrix::from_fn(n, n, |s, l| (2 * s + 1) as f64 * sign(l) * six(l, s));
    let p_in_t = DMatrix::from_fn(n, n, |l, s| (2 * l + 1) as f64 * sign(l) * six(s, l));
    TpTransform { t_in_p, p_in_t }
}
