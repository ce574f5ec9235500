//! Dense complex linear algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest absolute entry of `U U† - 1`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let prod = u * u.adjoint();
    max_abs_diff(&prod, &CMatrix::identity(u.nrows(), u.ncols()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// `exp(i t H)` for Hermitian `H`, via its eigendecomposition.
pub fn hermitian_exp_i(h: &CMatrix, t: f64) -> CMatrix {
    let herm = (h + h.adjoint()) * re(0.5);
    let eig = herm.symmetric_eigen();
    let phases = CVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, t * l)),
    );
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    scaled * v.adjoint()
}

/// Partial trace of a `(da*db) x (da*db)` operator over the second factor.
pub fn partial_trace_second(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    assert_eq!(m.nrows(), da * db);
    CMatrix::from_fn(da, da, |a, b| (0..db).map(|k| m[(a * db + k, b * db + k)]).sum())
}

/// Partial trace of a `(da*db) x (da*db)` operator over the first factor.
pub fn partial_trace_first(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    assert_eq!(m.nrows(), da * db);
    CMatrix::from_fn(db, db, |a, b| (0..da).map(|k| m[(k * db + a, k * db + b)]).sum())
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
pub fn sorted_hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let herm = (h + h.adjoint()) * re(0.5);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(h.nrows(), order.len(), |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}
