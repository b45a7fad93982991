//! Exact rational arithmetic.
//!
//! [`Scalar`] wraps an arbitrary-precision rational kept in canonical reduced
//! form with a positive denominator. Masses, lengths, weights, matrix entries
//! and cohomology coefficients are all `Scalar`s; nothing in the exact layer
//! ever rounds.
//!
//! The wire format is a fraction string: `"3/2"`, `"-45/1"`. Parsing also
//! accepts bare integers (`"7"`). Serialization always emits `"p/q"` so that
//! round-trips are byte-exact; [`Scalar::display`] shortens integral values
//! to `"p"` for human-facing tables.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ScalarParseError {
    #[error("empty string is not a rational")]
    Empty,
    #[error("denominator is zero in {0:?}")]
    ZeroDenominator(String),
    #[error("malformed rational {0:?}: expected \"p\" or \"p/q\"")]
    Malformed(String),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar(BigRational::from_integer(n))
    }

    /// Builds `p/q`, reducing to canonical form. Fails on `q = 0`.
    pub fn new(numer: i64, denom: i64) -> Result<Self, ScalarParseError> {
        if denom == 0 {
            return Err(ScalarParseError::ZeroDenominator(format!(
                "{numer}/{denom}"
            )));
        }
        Ok(Scalar(BigRational::new(
            BigInt::from(numer),
            BigInt::from(denom),
        )))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Scalar(self.0.recip()))
        }
    }

    /// Floor of the rational as a big integer.
    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Fractional part in `[0, 1)`: `self - floor(self)`.
    pub fn fract_mod_one(&self) -> Self {
        let f = Scalar(self.0.clone() - BigRational::from_integer(self.0.floor().to_integer()));
        debug_assert!(!f.is_negative() && f.0 < BigRational::one());
        f
    }

    /// Bit-size proxy used when choosing exact elimination pivots: smaller
    /// means the entry is arithmetically cheaper to divide by.
    pub fn pivot_complexity(&self) -> u64 {
        (self.0.numer().bits() + self.0.denom().bits()) as u64
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Canonical wire form, always `"p/q"`.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.0.numer(), self.0.denom())
    }

    /// Human-facing form: `"p"` when integral, `"p/q"` otherwise.
    pub fn display(&self) -> String {
        if self.0.is_integer() {
            self.0.numer().to_string()
        } else {
            self.to_fraction_string()
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Scalar::one();
        for _ in 0..exp {
            acc *= self.clone();
        }
        acc
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Option<Scalar> {
        if rhs.is_zero() {
            None
        } else {
            Some(Scalar(&self.0 / &rhs.0))
        }
    }
}

impl FromStr for Scalar {
    type Err = ScalarParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ScalarParseError::Empty);
        }
        let (numer, denom) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let n = BigInt::from_str(numer).map_err(|_| ScalarParseError::Malformed(s.to_owned()))?;
        let d = match denom {
            Some(d) => BigInt::from_str(d).map_err(|_| ScalarParseError::Malformed(s.to_owned()))?,
            None => BigInt::one(),
        };
        if d.is_zero() {
            return Err(ScalarParseError::ZeroDenominator(s.to_owned()));
        }
        Ok(Scalar(BigRational::new(n, d)))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", self.to_fraction_string())
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_fraction_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                Scalar((&self.0).$method(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Div for Scalar {
    type Output = Scalar;
    /// Panics on a zero divisor; use [`Scalar::checked_div`] where the
    /// divisor is data-dependent.
    fn div(self, rhs: Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division of Scalar by zero");
        Scalar(self.0 / rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl<'a> Neg for &'a Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0.clone())
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        self.0 -= rhs.0;
    }
}

impl MulAssign for Scalar {
    fn mul_assign(&mut self, rhs: Scalar) {
        self.0 *= rhs.0;
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

/// Compares by absolute value; used by elimination pivoting tests.
pub fn cmp_abs(a: &Scalar, b: &Scalar) -> Ordering {
    a.abs().cmp(&b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_reduces() {
        let s: Scalar = "6/4".parse().unwrap();
        assert_eq!(s.to_fraction_string(), "3/2");
        let t: Scalar = "-10/5".parse().unwrap();
        assert_eq!(t.to_fraction_string(), "-2/1");
        assert_eq!(t.display(), "-2");
        let bare: Scalar = "7".parse().unwrap();
        assert_eq!(bare, Scalar::from_integer(7));
    }

    #[test]
    fn negative_denominator_normalizes() {
        let s: Scalar = "3/-6".parse().unwrap();
        assert_eq!(s.to_fraction_string(), "-1/2");
        assert!(s.denom() > &BigInt::from(0));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(
            "1/0".parse::<Scalar>(),
            Err(ScalarParseError::ZeroDenominator("1/0".into()))
        );
        assert!(Scalar::new(1, 0).is_err());
    }

    #[test]
    fn serde_round_trip_is_byte_exact() {
        for raw in ["0/1", "3/2", "-45/1", "22/7"] {
            let s: Scalar = raw.parse().unwrap();
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(json, format!("\"{raw}\""));
            let back: Scalar = serde_json::from_str(&json).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn fract_mod_one_lands_in_unit_interval() {
        let cases = [("7/3", "1/3"), ("-1/4", "3/4"), ("2/1", "0/1"), ("-5/3", "1/3")];
        for (input, expect) in cases {
            let s: Scalar = input.parse().unwrap();
            assert_eq!(s.fract_mod_one(), expect.parse().unwrap());
        }
    }

    #[test]
    fn arithmetic_is_exact() {
        let third: Scalar = "1/3".parse().unwrap();
        let sum = third.clone() + third.clone() + third.clone();
        assert_eq!(sum, Scalar::one());
        let product = Scalar::new(2, 5).unwrap() * Scalar::new(5, 9).unwrap();
        assert_eq!(product, Scalar::new(2, 9).unwrap());
    }
}
