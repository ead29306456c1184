//! Exact rationals for probabilities and means.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// A probability stored as a reduced fraction of arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactProbability(BigRational);

impl ExactProbability {
    /// `count / total`; `total` must be positive and at least `count`.
    pub fn from_counts(count: &BigUint, total: &BigUint) -> Self {
        assert!(!total.is_zero(), "probability with zero denominator");
        assert!(count <= total, "probability above one");
        Self(BigRational::new(
            BigInt::from(count.clone()),
            BigInt::from(total.clone()),
        ))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.0)
    }
}

impl std::ops::Add for ExactProbability {
    type Output = BigRational;

    fn add(self, rhs: Self) -> BigRational {
        self.0 + rhs.0
    }
}

impl fmt::Display for ExactProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl Serialize for ExactProbability {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Fraction string `p/q`, always with an explicit denominator.
pub fn fraction_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal expansion rounded half away from zero to `places` digits.
pub fn decimal_string(r: &BigRational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = r * BigRational::from_integer(scale.clone());
    let rounded = scaled.round().to_integer();
    let negative = rounded.is_negative();
    let digits = rounded.abs().to_string();
    let places = places as usize;
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int, frac) = padded.split_at(padded.len() - places);
    let sign = if negative { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// Rounds a float to six decimals, the precision used in all float output.
pub fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, m| acc * BigUint::from(m))
}

/// `prod_{m=1..n} (2m-1)^2`, the number of ordered pick sequences of the
/// interval process after `n` steps.
pub fn interval_mass(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, m| {
        let odd = BigUint::from(2 * m - 1);
        acc * &odd * &odd
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn decimals() {
        assert_eq!(decimal_string(&q(7, 6), 3), "1.167");
        assert_eq!(decimal_string(&q(29, 24), 6), "1.208333");
        assert_eq!(decimal_string(&q(1, 3), 6), "0.333333");
        assert_eq!(decimal_string(&q(1, 1), 6), "1.000000");
        assert_eq!(decimal_string(&q(-1, 8), 2), "-0.13");
        assert_eq!(decimal_string(&q(5, 2), 0), "3");
    }

    #[test]
    fn probabilities_are_reduced() {
        let p = ExactProbability::from_counts(&BigUint::from(2u32), &BigUint::from(6u32));
        assert_eq!(p.to_string(), "1/3");
        assert_eq!(serde_json::to_string(&p).unwrap(), "\"1/3\"");
    }

    #[test]
    fn masses() {
        assert_eq!(factorial(0), BigUint::one());
        assert_eq!(factorial(6), BigUint::from(720u32));
        assert_eq!(factorial(21).to_string(), "51090942171709440000");
        assert_eq!(interval_mass(2), BigUint::from(9u32));
        assert_eq!(interval_mass(3), BigUint::from(225u32));
        assert_eq!(interval_mass(4), BigUint::from(11025u32));
    }
}
