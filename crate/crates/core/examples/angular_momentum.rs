//! Clebsch-Gordan coefficients, 6-j symbols and the spin-j rotation matrices.

use spinpow::angular::{clebsch_gordan, spin_z, wigner_6j, wigner_d};
use spinpow::linalg::unitarity_deviation;
use spinpow::HalfInt;

fn main() {
    let one = HalfInt::ONE;
    let zero = HalfInt::ZERO;
    println!("<1 1; 1 -1 | 0 0> = {:.12}", clebsch_gordan(one, one, one, -one, zero, zero));
    println!("<3/2 3/2; 3/2 3/2 | 3 3> = {}", clebsch_gordan(HalfInt::from_twice(3), HalfInt::from_twice(3), HalfInt::from_twice(3), HalfInt::from_twice(3), HalfInt::integer(3), HalfInt::integer(3)));

    let two = HalfInt::integer(2);
    println!("{{1 1 2; 1 1 0}} = {:.12}", wigner_6j(one, one, two, one, one, zero));
    let sum: f64 = (0..=2).map(|l| f64::from(2 * l + 1) * wigner_6j(one, one, two, one, one, HalfInt::integer(l))).sum();
    println!("sum_L (2L+1) {{1 1 2; 1 1 L}} = {sum:.12}");

    let j = HalfInt::from_twice(3);
    let d = wigner_d(j, 0.4, 1.1, -0.7);
    println!("D(3/2) unitarity deviation: {:.2e}", unitarity_deviation(d.matrix()));
    println!("J_z for j = 3/2 (m descending):\n{:.2}", spin_z(j).map(|z| z.re));
}
