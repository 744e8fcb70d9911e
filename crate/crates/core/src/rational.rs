//! Exact rationals over 128-bit integers.
//!
//! Every arithmetic operation is checked; leaving the `i128` range surfaces
//! as [`Error::Overflow`] instead of wrapping or falling back to floats.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A reduced fraction with positive denominator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(Ratio<i128>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));

    pub fn new(numer: i128, denom: i128) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        if numer == i128::MIN || denom == i128::MIN {
            return Err(Error::Overflow);
        }
        Ok(Rational(Ratio::new(numer, denom)))
    }

    pub fn from_int(value: i128) -> Self {
        Rational(Ratio::from_integer(value))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn add(&self, other: &Rational) -> Result<Rational> {
        self.0
            .checked_add(&other.0)
            .map(Rational)
            .ok_or(Error::Overflow)
    }

    pub fn sub(&self, other: &Rational) -> Result<Rational> {
        self.0
            .checked_sub(&other.0)
            .map(Rational)
            .ok_or(Error::Overflow)
    }

    pub fn mul(&self, other: &Rational) -> Result<Rational> {
        self.0
            .checked_mul(&other.0)
            .map(Rational)
            .ok_or(Error::Overflow)
    }

    pub fn div(&self, other: &Rational) -> Result<Rational> {
        if other.is_zero() {
            return Err(Error::InvalidArgument("division by zero".into()));
        }
        self.0
            .checked_div(&other.0)
            .map(Rational)
            .ok_or(Error::Overflow)
    }

    pub fn mul_int(&self, k: i128) -> Result<Rational> {
        self.mul(&Rational::from_int(k))
    }

    pub fn neg(&self) -> Rational {
        Rational(-self.0)
    }

    pub fn recip(&self) -> Result<Rational> {
        Rational::ONE.div(self)
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> i128 {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> i128 {
        self.0.ceil().to_integer()
    }

    /// Lossy conversion for display purposes only.
    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// Rational approximation of a finite float with the given denominator,
    /// rounding up.
    pub fn from_f64_ceil(value: f64, denom: i128) -> Result<Rational> {
        if !value.is_finite() || denom <= 0 {
            return Err(Error::InvalidArgument(format!(
                "cannot approximate {value}"
            )));
        }
        let scaled = (value * denom as f64).ceil();
        if scaled.abs() >= i128::MAX as f64 {
            return Err(Error::Overflow);
        }
        Rational::new(scaled as i128, denom)
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a Rational>>(items: I) -> Result<Rational> {
        items
            .into_iter()
            .try_fold(Rational::ZERO, |acc, x| acc.add(x))
    }

    pub fn min(self, other: Rational) -> Rational {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: Rational) -> Rational {
        std::cmp::max(self, other)
    }
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Rational::from_int(value as i128)
    }
}

impl From<usize> for Rational {
    fn from(value: usize) -> Self {
        Rational::from_int(value as i128)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p/q` or a bare integer `p`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("not a rational: {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i128 = n.trim().parse().map_err(|_| bad())?;
                let d: i128 = d.trim().parse().map_err(|_| bad())?;
                Rational::new(n, d)
            }
            None => s.parse::<i128>().map(Rational::from_int).map_err(|_| bad()),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Least common multiple of the denominators, checked.
pub fn common_denominator<'a, I: IntoIterator<Item = &'a Rational>>(items: I) -> Result<i128> {
    let mut acc: i128 = 1;
    for r in items {
        let d = r.denom();
        let g = gcd(acc, d);
        acc = (acc / g).checked_mul(d).ok_or(Error::Overflow)?;
    }
    Ok(acc)
}

pub(crate) fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
