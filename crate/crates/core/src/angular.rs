//! SU(2) special functions: Clebsch-Gordan coefficients, Wigner 6-j symbols,
//! rotation matrices and the spin operators.
//!
//! Clebsch-Gordan coefficients and 6-j symbols are evaluated with the Racah
//! sums in exact rational arithmetic. Only the final `sign * sqrt(p * s^2)` is
//! rounded to `f64`, so the alternating sums never cancel catastrophically.
//! Phases follow the Condon-Shortley convention and bases are ordered by
//! descending projection `m = j, j-1, ..., -j`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use num_complex::Complex64;

use crate::halfint::{triangle, HalfInt};
use crate::linalg::{re, CMatrix};
use crate::operators::SpinOperator;

const FACTORIAL_TABLE: usize = 256;

fn big_factorials() -> &'static [BigInt] {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(FACTORIAL_TABLE);
        v.push(BigInt::one());
        for n in 1..FACTORIAL_TABLE {
            let next = &v[n - 1] * BigInt::from(n);
            v.push(next);
        }
        v
    })
}

fn fact(n: i32) -> &'static BigInt {
    assert!(n >= 0 && (n as usize) < FACTORIAL_TABLE, "factorial argument {n} out of range");
    &big_factorials()[n as usize]
}

/// Integer value of a combination of twice-values that must be even.
fn half(twice: i32) -> i32 {
    debug_assert!(twice % 2 == 0, "non-integer factorial argument {twice}/2");
    twice / 2
}

fn signed_sqrt(prefactor: &BigRational, sum: &BigRational) -> f64 {
    if sum.is_zero() {
        return 0.0;
    }
    let magnitude = (prefactor * sum * sum).to_f64().expect("finite rational").sqrt();
    if sum.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

type CgKey = (i32, i32, i32, i32, i32, i32);
type SixJKey = [i32; 6];

fn cg_cache() -> &'static Mutex<HashMap<CgKey, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<CgKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn sixj_cache() -> &'static Mutex<HashMap<SixJKey, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<SixJKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Clebsch-Gordan coefficient `<j1 m1; j2 m2 | J M>`.
///
/// Returns `0` whenever a label is invalid, `M != m1 + m2`, or the triangle
/// condition on `(j1, j2, J)` fails.
pub fn clebsch_gordan(j1: HalfInt, m1: HalfInt, j2: HalfInt, m2: HalfInt, jj: HalfInt, mm: HalfInt) -> f64 {
    if !(j1.admits(m1) && j2.admits(m2) && jj.admits(mm)) {
        return 0.0;
    }
    if mm != m1 + m2 || !triangle(j1, j2, jj) {
        return 0.0;
    }
    let key = (j1.twice(), m1.twice(), j2.twice(), m2.twice(), jj.twice(), mm.twice());
    if let Some(&v) = cg_cache().lock().unwrap().get(&key) {
        return v;
    }
    let value = clebsch_gordan_exact(key);
    cg_cache().lock().unwrap().insert(key, value);
    value
}

fn clebsch_gordan_exact((j1, m1, j2, m2, jj, mm): CgKey) -> f64 {
    let ratio = |num: &[i32], den: &[i32]| -> BigRational {
        let n: BigInt = num.iter().map(|&k| fact(k)).product();
        let d: BigInt = den.iter().map(|&k| fact(k)).product();
        BigRational::new(n, d)
    };
    let prefactor = BigRational::from_integer(BigInt::from(jj + 1))
        * ratio(
            &[half(jj + j1 - j2), half(jj - j1 + j2), half(j1 + j2 - jj)],
            &[half(j1 + j2 + jj) + 1],
        )
        * ratio(
            &[
                half(jj + mm),
                half(jj - mm),
                half(j1 - m1),
                half(j1 + m1),
                half(j2 - m2),
                half(j2 + m2),
            ],
            &[],
        );

    let k_min = 0.max(half(j2 - jj - m1)).max(half(j1 + m2 - jj));
    let k_max = half(j1 + j2 - jj).min(half(j1 - m1)).min(half(j2 + m2));
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let den: BigInt = [
            k,
            half(j1 + j2 - jj) - k,
            half(j1 - m1) - k,
            half(j2 + m2) - k,
            half(jj - j2 + m1) + k,
            half(jj - j1 - m2) + k,
        ]
        .iter()
        .map(|&a| fact(a))
        .product();
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    signed_sqrt(&prefactor, &sum)
}

fn triangle_delta(a: i32, b: i32, c: i32) -> BigRational {
    BigRational::new(
        fact(half(a + b - c)) * fact(half(a - b + c)) * fact(half(-a + b + c)),
        fact(half(a + b + c) + 1).clone(),
    )
}

/// Wigner 6-j symbol `{a b c; d e f}`; zero when any triad violates the
/// triangle condition.
pub fn wigner_6j(a: HalfInt, b: HalfInt, c: HalfInt, d: HalfInt, e: HalfInt, f: HalfInt) -> f64 {
    if !(triangle(a, b, c) && triangle(a, e, f) && triangle(d, b, f) && triangle(d, e, c)) {
        return 0.0;
    }
    let key = [a.twice(), b.twice(), c.twice(), d.twice(), e.twice(), f.twice()];
    if let Some(&v) = sixj_cache().lock().unwrap().get(&key) {
        return v;
    }
    let value = wigner_6j_exact(key);
    sixj_cache().lock().unwrap().insert(key, value);
    value
}

fn wigner_6j_exact([a, b, c, d, e, f]: SixJKey) -> f64 {
    let prefactor = triangle_delta(a, b, c) * triangle_delta(a, e, f) * triangle_delta(d, b, f) * triangle_delta(d, e, c);
    let triads = [half(a + b + c), half(a + e + f), half(d + b + f), half(d + e + c)];
    let quads = [half(a + b + d + e), half(a + c + d + f), half(b + c + e + f)];
    let k_min = *triads.iter().max().unwrap();
    let k_max = *quads.iter().min().unwrap();
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let den: BigInt = triads
            .iter()
            .map(|&t| fact(k - t))
            .chain(quads.iter().map(|&q| fact(q - k)))
            .product();
        let term = BigRational::new(fact(k + 1).clone(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    signed_sqrt(&prefactor, &sum)
}

fn ln_factorial(n: i32) -> f64 {
    (1..=n).map(|k| f64::from(k).ln()).sum()
}

/// Small Wigner matrix element `d^j_{m' m}(beta) = <j m'| exp(-i beta J_y) |j m>`.
pub fn small_d(j: HalfInt, mp: HalfInt, m: HalfInt, beta: f64) -> f64 {
    if !(j.admits(mp) && j.admits(m)) {
        return 0.0;
    }
    let (jt, mpt, mt) = (j.twice(), mp.twice(), m.twice());
    let (cb, sb) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let log_norm = 0.5
        * (ln_factorial(half(jt + mpt)) + ln_factorial(half(jt - mpt)) + ln_factorial(half(jt + mt)) + ln_factorial(half(jt - mt)));
    let k_min = 0.max(half(mt - mpt));
    let k_max = half(jt + mt).min(half(jt - mpt));
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let log_den = ln_factorial(half(jt + mt) - k) + ln_factorial(k) + ln_factorial(half(jt - mpt) - k) + ln_factorial(k + half(mpt - mt));
        let sign = if (k + half(mpt - mt)).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let cos_pow = half(2 * jt + mt - mpt) - 2 * k;
        let sin_pow = 2 * k + half(mpt - mt);
        sum += sign * (log_norm - log_den).exp() * cb.powi(cos_pow) * sb.powi(sin_pow);
    }
    sum
}

/// Rotation matrix `D^j(alpha, beta, gamma) = exp(-i alpha Jz) exp(-i beta Jy) exp(-i gamma Jz)`
/// (active zyz Euler angles).
pub fn wigner_d(j: HalfInt, alpha: f64, beta: f64, gamma: f64) -> SpinOperator {
    let ms: Vec<HalfInt> = j.projections().collect();
    let matrix = CMatrix::from_fn(ms.len(), ms.len(), |r, col| {
        let (mp, m) = (ms[r], ms[col]);
        let phase = -(mp.value() * alpha + m.value() * gamma);
        Complex64::from_polar(1.0, phase) * small_d(j, mp, m, beta)
    });
    SpinOperator::new(j, matrix).expect("dimension matches by construction")
}

/// `J_z` in the descending-`m` basis.
pub fn spin_z(j: HalfInt) -> CMatrix {
    let ms: Vec<HalfInt> = j.projections().collect();
    CMatrix::from_fn(ms.len(), ms.len(), |r, c| if r == c { re(ms[r].value()) } else { re(0.0) })
}

/// Raising operator `J_+`.
pub fn spin_plus(j: HalfInt) -> CMatrix {
    let ms: Vec<HalfInt> = j.projections().collect();
    let jv = j.value();
    CMatrix::from_fn(ms.len(), ms.len(), |r, c| {
        // <m+1| J+ |m>: row index one above the column
        if r + 1 == c {
            let m = ms[c].value();
            re((jv * (jv + 1.0) - m * (m + 1.0)).sqrt())
        } else {
            re(0.0)
        }
    })
}

pub fn spin_x(j: HalfInt) -> CMatrix {
    let p = spin_plus(j);
    (&p + p.adjoint()) * re(0.5)
}

pub fn spin_y(j: HalfInt) -> CMatrix {
    let p = spin_plus(j);
    (&p - p.adjoint()) * Complex64::new(0.0, -0.5)
}

/// Active rotation `R_z(alpha) R_y(beta) R_z(gamma)` as a 3x3 real matrix.
pub fn rotation_matrix(alpha: f64, beta: f64, gamma: f64) -> [[f64; 3]; 3] {
    let rz = |t: f64| [[t.cos(), -t.sin(), 0.0], [t.sin(), t.cos(), 0.0], [0.0, 0.0, 1.0]];
    let ry = |t: f64| [[t.cos(), 0.0, t.sin()], [0.0, 1.0, 0.0], [-t.sin(), 0.0, t.cos()]];
    mat3_mul(&mat3_mul(&rz(alpha), &ry(beta)), &rz(gamma))
}

pub(crate) fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (k, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|l| a[i][l] * b[l][k]).sum();
        }
    }
    out
}

/// Euler angles of an SU(2) element `[[a, b], [c, d]]` in the zyz convention
/// used by [`wigner_d`]; the element is recovered exactly, not just up to sign.
pub fn su2_euler_angles(u: &CMatrix) -> (f64, f64, f64) {
    let (a, c) = (u[(0, 0)], u[(1, 0)]);
    let beta = 2.0 * c.norm().atan2(a.norm());
    // a = e^{-i(alpha+gamma)/2} cos(beta/2), c = e^{i(alpha-gamma)/2} sin(beta/2)
    let sum = if a.norm() > 1e-14 { -2.0 * a.arg() } else { 0.0 };
    let diff = if c.norm() > 1e-14 { 2.0 * c.arg() } else { 0.0 };
    let alpha = (sum + diff) / 2.0;
    let gamma = (sum - diff) / 2.0;
    // fix the residual 2π ambiguity so the SU(2) element matches exactly
    let candidate = wigner_d(HalfInt::HALF, alpha, beta, gamma);
    if (candidate.matrix()[(0, 0)] - a).norm() + (candidate.matrix()[(1, 0)] - c).norm() < 1e-9 {
        (alpha, beta, gamma)
    } else {
        (alpha + 2.0 * std::f64::consts::PI, beta, gamma)
    }
}
