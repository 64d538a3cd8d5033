//! Scalar abstraction shared by the exact and floating-point code paths.
//!
//! Structural analysis (orders, orbits, partitions, Perron vectors) runs over
//! [`Rational`]; long-horizon simulation runs over `f64`. Everything in
//! [`crate::stomat`] is written once against [`Scalar`].

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number used for all exact computations.
pub type Rational = BigRational;

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// `true` when arithmetic is exact and equality is meaningful.
    const EXACT: bool;

    /// Slack allowed on row sums when validating stochasticity.
    fn row_sum_tolerance() -> Self;

    /// Threshold under which an entry is rounded to 0 (or within which it is
    /// rounded to 1) when detecting permutation structure.
    fn unit_tolerance() -> Self;

    fn to_f64(&self) -> f64;

    fn from_rational(r: &Rational) -> Self;

    /// JSON encoding: `"p/q"` strings for exact values, numbers for floats.
    fn to_json(&self) -> serde_json::Value;

    fn from_json(value: &serde_json::Value) -> Result<Self>;

    fn near(&self, other: &Self, tol: &Self) -> bool {
        (self.clone() - other.clone()).abs() <= *tol
    }

    /// Entry is (within [`Scalar::unit_tolerance`]) zero.
    fn is_negligible(&self) -> bool {
        self.near(&Self::zero(), &Self::unit_tolerance())
    }

    /// Entry is (within [`Scalar::unit_tolerance`]) one.
    fn is_unit(&self) -> bool {
        self.near(&Self::one(), &Self::unit_tolerance())
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn row_sum_tolerance() -> Self {
        Self::zero()
    }

    fn unit_tolerance() -> Self {
        Self::zero()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }

    fn from_json(value: &serde_json::Value) -> Result<Self> {
        match value {
            serde_json::Value::String(s) => parse_rational(s),
            // Number text is re-parsed as a decimal so 0.1 stays 1/10.
            serde_json::Value::Number(n) => parse_rational(&n.to_string()),
            other => Err(Error::Parse(format!("expected rational, found {other}"))),
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn row_sum_tolerance() -> Self {
        1e-12
    }

    fn unit_tolerance() -> Self {
        1e-6
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }

    fn from_json(value: &serde_json::Value) -> Result<Self> {
        match value {
            serde_json::Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("number {n} out of range"))),
            serde_json::Value::String(s) => Ok(Self::from_rational(&parse_rational(s)?)),
            other => Err(Error::Parse(format!("expected number, found {other}"))),
        }
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn row_sum_tolerance() -> Self {
        1e-5
    }

    fn unit_tolerance() -> Self {
        1e-4
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f32(r).unwrap_or(f32::NAN)
    }

    fn to_json(&self) -> serde_json::Value {
        f64::from(*self).to_json()
    }

    fn from_json(value: &serde_json::Value) -> Result<Self> {
        f64::from_json(value).map(|x| x as f32)
    }
}

/// `p/q` shorthand for tests and fixtures.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"`, an integer, or a finite decimal literal such as `"0.125"`
/// or `"1e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("invalid rational literal {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let negative = int_part.starts_with('-');
    let int_digits = int_part.trim_start_matches(['-', '+']);
    if int_digits.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_digits.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_digits}{frac_part}");
    let mut numer = if digits.is_empty() {
        BigInt::zero()
    } else {
        BigInt::from_str(&digits).map_err(|_| bad())?
    };
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Canonical text form: `"p/q"`, or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
