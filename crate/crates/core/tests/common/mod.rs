#![allow(dead_code)]

use proptest::prelude::*;
use spinpow::haar::{haar_matrix, stream_rng};
use spinpow::linalg::{re, CMatrix};
use spinpow::HalfInt;

/// j from 1/2 to 5/2.
pub fn any_spin() -> impl Strategy<Value = HalfInt> {
    (1..=5i32).prop_map(HalfInt::from_twice)
}

/// (j, q) with j ≤ 5/2 and 1 ≤ q ≤ ⌊j⌋.
pub fn spin_and_q() -> impl Strategy<Value = (HalfInt, i32)> {
    (2..=5i32).prop_flat_map(|t| {
        let j = HalfInt::from_twice(t);
        (Just(j), 1..=j.floor())
    })
}

pub fn angles() -> impl Strategy<Value = (f64, f64, f64)> {
    (-3.2..3.2f64, 0.0..3.15f64, -3.2..3.2f64)
}

pub fn random_hermitian(d: usize, seed: u64) -> CMatrix {
    let g = haar_matrix(d, &mut stream_rng(seed, 77));
    let a = CMatrix::from_fn(d, d, |r, c| g[(r, c)] * re(1.0 + (r * d + c) as f64 / (d * d) as f64));
    (&a + a.adjoint()) * re(0.5)
}
