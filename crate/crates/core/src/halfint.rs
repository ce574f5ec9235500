//! Half-integer angular momentum labels.
//!
//! A [`HalfInt`] stores twice its value, so `j = 3/2` is `HalfInt::from_twice(3)`.
//! Spin magnitudes are non-negative; projection labels `m` may be negative.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::SpinError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt { twice }
    }

    pub const fn integer(n: i32) -> Self {
        HalfInt { twice: 2 * n }
    }

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// Dimension `2j + 1` of the irrep labelled by `self`.
    pub fn dim(self) -> usize {
        debug_assert!(self.twice >= 0);
        (self.twice + 1) as usize
    }

    /// `⌊j⌋`, the largest admissible bipartition index `q`.
    pub const fn floor(self) -> i32 {
        self.twice.div_euclid(2)
    }

    /// Integer value; panics on half-odd labels.
    pub fn as_integer(self) -> i32 {
        assert!(self.is_integer(), "{self} is not an integer");
        self.twice / 2
    }

    /// Projections `m = j, j-1, ..., -j` in descending order.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = HalfInt> + Clone {
        let t = self.twice;
        (0..=t).map(move |k| HalfInt::from_twice(t - 2 * k))
    }

    /// Whether `m` is a valid projection of `self`: `|2m| <= 2j` and same parity.
    pub fn admits(self, m: HalfInt) -> bool {
        self.twice >= 0 && m.twice.abs() <= self.twice && (self.twice - m.twice) % 2 == 0
    }

    /// Position of `m` in the descending basis `j, j-1, ..., -j`.
    pub fn index_of(self, m: HalfInt) -> usize {
        debug_assert!(self.admits(m));
        ((self.twice - m.twice) / 2) as usize
    }
}

pub fn triangle(a: HalfInt, b: HalfInt, c: HalfInt) -> bool {
    let (a, b, c) = (a.twice, b.twice, c.twice);
    a >= 0 && b >= 0 && c >= 0 && (a + b + c) % 2 == 0 && c <= a + b && c >= (a - b).abs()
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice + rhs.twice)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt::from_twice(self.twice - rhs.twice)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_twice(-self.twice)
    }
}

impl From<i32> for HalfInt {
    fn from(n: i32) -> Self {
        HalfInt::integer(n)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for HalfInt {
    type Err = SpinError;

    /// Accepts `"1"`, `"3/2"`, `"-1/2"` or `"1.5"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || SpinError::InvalidLabel(s.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let num: i32 = num.trim().parse().map_err(|_| bad())?;
            match den.trim() {
                "1" => Ok(HalfInt::integer(num)),
                "2" => Ok(HalfInt::from_twice(num)),
                _ => Err(bad()),
            }
        } else if let Ok(n) = s.parse::<i32>() {
            Ok(HalfInt::integer(n))
        } else {
            let x: f64 = s.parse().map_err(|_| bad())?;
            HalfInt::try_from(x).map_err(|_| bad())
        }
    }
}

impl TryFrom<f64> for HalfInt {
    type Error = SpinError;

    fn try_from(x: f64) -> Result<Self, Self::Error> {
        let t = 2.0 * x;
        if !t.is_finite() || (t - t.round()).abs() > 1e-9 || t.abs() > f64::from(i32::MAX) {
            return Err(SpinError::InvalidLabel(x.to_string()));
        }
        Ok(HalfInt::from_twice(t.round() as i32))
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct HalfIntVisitor;

        impl Visitor<'_> for HalfIntVisitor {
            type Value = HalfInt;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a half-integer such as 1, \"3/2\" or 1.5")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<HalfInt, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<HalfInt, E> {
                i32::try_from(v).map(HalfInt::integer).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<HalfInt, E> {
                i32::try_from(v).map(HalfInt::integer).map_err(E::custom)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<HalfInt, E> {
                HalfInt::try_from(v).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(HalfIntVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_cli_spellings() {
        assert_eq!("3/2".parse::<HalfInt>().unwrap(), HalfInt::from_twice(3));
        assert_eq!("1.5".parse::<HalfInt>().unwrap(), HalfInt::from_twice(3));
        assert_eq!("2".parse::<HalfInt>().unwrap(), HalfInt::integer(2));
        assert_eq!("-1/2".parse::<HalfInt>().unwrap(), HalfInt::from_twice(-1));
        assert!("1.25".parse::<HalfInt>().is_err());
        assert!("3/4".parse::<HalfInt>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for t in -7..=7 {
            let h = HalfInt::from_twice(t);
            assert_eq!(h.to_string().parse::<HalfInt>().unwrap(), h);
        }
    }

    #[test]
    fn projections_descend() {
        let m: Vec<i32> = HalfInt::from_twice(3).projections().map(HalfInt::twice).collect();
        assert_eq!(m, vec![3, 1, -1, -3]);
        assert_eq!(HalfInt::from_twice(3).index_of(HalfInt::from_twice(-1)), 2);
    }

    #[test]
    fn admits_requires_matching_parity() {
        let j = HalfInt::ONE;
        assert!(j.admits(HalfInt::ZERO));
        assert!(!j.admits(HalfInt::HALF));
        assert!(!j.admits(HalfInt::integer(2)));
    }

    #[test]
    fn serde_accepts_numbers_and_strings() {
        let a: HalfInt = serde_json::from_str("\"3/2\"").unwrap();
        let b: HalfInt = serde_json::from_str("1.5").unwrap();
        let c: HalfInt = serde_json::from_str("2").unwrap();
        assert_eq!(a, b);
        assert_eq!(c, HalfInt::integer(2));
        assert_eq!(serde_json::to_string(&a).unwrap(), "\"3/2\"");
    }
}
