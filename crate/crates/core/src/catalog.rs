//! Known extremal gates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::SpinError;
use crate::geometry::UnitaryGate;
use crate::halfint::HalfInt;
use crate::linalg::{c, re, CMatrix, I};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnownGate {
    /// Spin 1, the ω-matrix `U_0` with `ω = e^{-iπ/3}`.
    J1Omega,
    /// Spin 1, the permutation gate `U_0'`.
    J1Perm,
    /// Spin 3/2 optimum.
    J32Opt,
    /// Spin 2 candidate for `q = 1`.
    J2Q1,
    /// Spin 2 candidate for `q = 2`.
    J2Q2,
}

impl KnownGate {
    pub const ALL: [KnownGate; 5] = [KnownGate::J1Omega, KnownGate::J1Perm, KnownGate::J32Opt, KnownGate::J2Q1, KnownGate::J2Q2];

    pub fn id(self) -> &'static str {
        match self {
            KnownGate::J1Omega => "j1_omega",
            KnownGate::J1Perm => "j1_perm",
            KnownGate::J32Opt => "j32_opt",
            KnownGate::J2Q1 => "j2_q1",
            KnownGate::J2Q2 => "j2_q2",
        }
    }

    pub fn j(self) -> HalfInt {
        match self {
            KnownGate::J1Omega | KnownGate::J1Perm => HalfInt::ONE,
            KnownGate::J32Opt => HalfInt::from_twice(3),
            KnownGate::J2Q1 | KnownGate::J2Q2 => HalfInt::integer(2),
        }
    }

    /// Bipartition for which the gate is extremal.
    pub fn q(self) -> i32 {
        match self {
            KnownGate::J2Q2 => 2,
            _ => 1,
        }
    }

    /// Entangling power at [`KnownGate::q`] as an exact fraction `(num, den)`.
    pub fn ep_fraction(self) -> (u64, u64) {
        match self {
            KnownGate::J1Omega | KnownGate::J1Perm => (3, 5),
            KnownGate::J32Opt => (20, 21),
            KnownGate::J2Q1 => (6889, 7140),
            KnownGate::J2Q2 => (25, 28),
        }
    }

    pub fn expected_ep(self) -> f64 {
        let (n, d) = self.ep_fraction();
        n as f64 / d as f64
    }

    /// True for gates only conjectured to be global maxima.
    pub fn conjectural(self) -> bool {
        matches!(self, KnownGate::J2Q1 | KnownGate::J2Q2)
    }

    pub fn gate(self) -> UnitaryGate {
        known_gate(self)
    }
}

impl fmt::Display for KnownGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for KnownGate {
    type Err = SpinError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        KnownGate::ALL
            .into_iter()
            .find(|g| g.id() == s)
            .ok_or_else(|| SpinError::InvalidLabel(format!("unknown catalog gate '{s}'")))
    }
}

fn permutation_with_phases(entries: &[(usize, usize, num_complex::Complex64)], d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for &(r, col, v) in entries {
        m[(r, col)] = v;
    }
    m
}

pub fn known_gate(id: KnownGate) -> UnitaryGate {
    let one = re(1.0);
    let matrix = match id {
        KnownGate::J1Omega => {
            let w = c(0.0, -std::f64::consts::FRAC_PI_3).exp();
            permutation_with_phases(
                &[(0, 0, (w + one) * 0.5), (0, 2, (w - one) * 0.5), (1, 1, w.inv()), (2, 0, (w - one) * 0.5), (2, 2, (w + one) * 0.5)],
                3,
            )
        }
        KnownGate::J1Perm => permutation_with_phases(&[(0, 0, one), (1, 2, one), (2, 1, one)], 3),
        KnownGate::J32Opt => permutation_with_phases(&[(0, 1, one), (1, 3, I), (2, 0, I), (3, 2, one)], 4),
        KnownGate::J2Q1 => {
            let alpha = (83.0f64 / 53.0).sqrt().atan();
            let beta = c(0.0, -(53.0f64 / 83.0).sqrt().atan()).exp();
            let e = |x: f64| c(0.0, x).exp();
            let quarter = std::f64::consts::FRAC_PI_4;
            permutation_with_phases(
                &[
                    (0, 0, beta * alpha.cos()),
                    (0, 4, I * beta * alpha.sin()),
                    (1, 1, e(quarter)),
                    (2, 2, beta * beta),
                    (3, 3, e(-quarter)),
                    (4, 0, -I * beta * alpha.sin()),
                    (4, 4, -beta * alpha.cos()),
                ],
                5,
            )
        }
        KnownGate::J2Q2 => permutation_with_phases(&[(0, 3, I), (1, 0, I), (2, 2, one), (3, 4, I), (4, 1, I)], 5),
    };
    UnitaryGate::from_matrix(id.j(), matrix).expect("catalog gates are unitary")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ep_geometric;

    #[test]
    fn ids_round_trip() {
        for g in KnownGate::ALL {
            assert_eq!(g.id().parse::<KnownGate>().unwrap(), g);
            assert_eq!(serde_json::to_string(&g).unwrap(), format!("\"{}\"", g.id()));
        }
        assert!("j9".parse::<KnownGate>().is_err());
    }

    #[test]
    fn permutation_gate_swaps_last_two() {
        let m = known_gate(KnownGate::J1Perm).matrix().clone();
        assert_eq!(m[(0, 0)], re(1.0));
        assert_eq!(m[(1, 2)], re(1.0));
        assert_eq!(m[(2, 1)], re(1.0));
        assert_eq!(m.iter().filter(|z| z.norm() > 0.0).count(), 3);
    }

    #[test]
    fn catalog_values() {
        for g in KnownGate::ALL {
            let ep = ep_geometric(&g.gate(), g.q()).unwrap();
            assert!((ep - g.expected_ep()).abs() < 1e-12, "{g}: {ep}");
        }
    }
}
