//! Exact rational arithmetic for measures and thresholds.
//!
//! Every numeric quantity in this crate — matrix entries, capacity values,
//! Möbius masses, formula thresholds — is a [`Rational`]. There is no
//! floating point anywhere on an evaluation path, so comparisons like
//! "measure ≥ threshold" are exact.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use thiserror::Error;

/// An exact rational number, kept in lowest terms.
///
/// The type itself is signed: intermediate values (Möbius masses, deficits)
/// can legitimately be negative, and validators need to be able to hold a
/// negative value in order to report it. The places where a value must lie in
/// `[0, 1]` — thresholds, matrix entries, capacities — enforce that at their
/// own boundaries.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RationalParseError {
    #[error("empty number")]
    Empty,
    #[error("malformed number {0:?} (expected an integer, n/d or a decimal)")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// Builds `n/d`. Panics if `d` is zero; use [`Rational::parse`] for
    /// untrusted input.
    pub fn new(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// Parses `"2/5"`, `"0.6"`, `"1"` (and signed forms) into an exact value.
    /// Decimals convert exactly: `0.6` is 3/5, never a float.
    pub fn parse(text: &str) -> Result<Self, RationalParseError> {
        let s = text.trim();
        if s.is_empty() {
            return Err(RationalParseError::Empty);
        }
        let (negative, digits) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let malformed = || RationalParseError::Malformed(text.to_string());
        let value = if let Some((n, d)) = digits.split_once('/') {
            let n: BigInt = parse_digits(n).ok_or_else(malformed)?;
            let d: BigInt = parse_digits(d).ok_or_else(malformed)?;
            if d.is_zero() {
                return Err(RationalParseError::ZeroDenominator(text.to_string()));
            }
            BigRational::new(n, d)
        } else if let Some((int, frac)) = digits.split_once('.') {
            let int: BigInt = parse_digits(int).ok_or_else(malformed)?;
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed());
            }
            let frac_num: BigInt = parse_digits(frac).ok_or_else(malformed)?;
            let scale = BigInt::from(10u8).pow(frac.len() as u32);
            BigRational::new(int * &scale + frac_num, scale)
        } else {
            BigRational::from_integer(parse_digits(digits).ok_or_else(malformed)?)
        };
        Ok(Rational(if negative { -value } else { value }))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// True when the value lies in the closed interval `[0, 1]`.
    pub fn in_unit_interval(&self) -> bool {
        !self.0.is_negative() && self.0 <= BigRational::one()
    }

    /// `1 - self`; the complement threshold used by the dual modal forms.
    pub fn complement(&self) -> Rational {
        Rational(BigRational::one() - &self.0)
    }

    /// Lossy conversion for display purposes only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(s).ok()
}

impl fmt::Display for Rational {
    /// Lowest-terms `n/d`, or just `n` for integers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = RationalParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rational::parse(s)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Rational::parse(&s).map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}
