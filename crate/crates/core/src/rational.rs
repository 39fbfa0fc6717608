//! Exact nonnegative rationals over arbitrary-precision integers.
//!
//! [`Rat`] is always kept in lowest terms with a positive denominator, and
//! zero is stored as `0/1`. [`ExtRat`] adjoins a single point at infinity,
//! which is all the elasticity sweeps ever need.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Nonnegative rational number in canonical reduced form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rat(Ratio<BigUint>);

impl Rat {
    pub fn new(num: impl Into<BigUint>, den: impl Into<BigUint>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rat(Ratio::new(num.into(), den)))
    }

    pub fn from_int(n: impl Into<BigUint>) -> Self {
        Rat(Ratio::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rat(Ratio::zero())
    }

    pub fn one() -> Self {
        Rat(Ratio::one())
    }

    pub fn numer(&self) -> &BigUint {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigUint {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// `(n(q), d(q))` for a positive rational.
    pub fn num_den(&self) -> Result<(BigUint, BigUint)> {
        if self.is_zero() {
            return Err(Error::ZeroHasNoNumDen);
        }
        Ok((self.numer().clone(), self.denom().clone()))
    }

    pub fn pow(&self, exp: u32) -> Rat {
        Rat(Pow::pow(&self.0, exp))
    }

    /// Quotient `self / other`; `other` must be nonzero.
    pub fn div(&self, other: &Rat) -> Result<Rat> {
        if other.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rat(&self.0 / &other.0))
    }

    /// `|self - other|`.
    pub fn abs_diff(&self, other: &Rat) -> Rat {
        if self >= other {
            Rat(&self.0 - &other.0)
        } else {
            Rat(&other.0 - &self.0)
        }
    }

    /// Multiply by an integer and return the result as `u64` if it is an
    /// integer that fits.
    pub fn scaled_to_u64(&self, scale: &BigUint) -> Option<Option<u64>> {
        let prod = &self.0 * Ratio::from_integer(scale.clone());
        if !prod.is_integer() {
            return None;
        }
        Some(prod.to_integer().to_u64())
    }

    /// Lossy conversion for human-readable tables only.
    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(self.numer(), self.denom())
    }
}

fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    // shift both sides down so the f64 conversion keeps the leading bits
    let shift = num.bits().max(den.bits()).saturating_sub(1000);
    let n = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

impl From<u64> for Rat {
    fn from(n: u64) -> Self {
        Rat::from_int(n)
    }
}

impl Add for &Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        Rat(&self.0 + &rhs.0)
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        Rat(self.0 + rhs.0)
    }
}

impl Mul for &Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        Rat(&self.0 * &rhs.0)
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        Rat(self.0 * rhs.0)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_digits(s: &str, whole: &str) -> Result<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::ParseRat(whole.to_string()));
    }
    BigUint::from_str(s).map_err(|_| Error::ParseRat(whole.to_string()))
}

impl FromStr for Rat {
    type Err = Error;

    /// Accepts `p/q` or a bare integer `p`. No whitespace, no signs.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('/') {
            Some((p, q)) => Rat::new(parse_digits(p, s)?, parse_digits(q, s)?),
            None => Ok(Rat::from_int(parse_digits(s, s)?)),
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A rational value or `∞`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExtRat {
    Finite(Rat),
    Infinity,
}

impl ExtRat {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ExtRat::Finite(q) => Some(q),
            ExtRat::Infinity => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtRat::Finite(q) => q.to_f64(),
            ExtRat::Infinity => f64::INFINITY,
        }
    }
}

impl From<Rat> for ExtRat {
    fn from(q: Rat) -> Self {
        ExtRat::Finite(q)
    }
}

impl Ord for ExtRat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => a.cmp(b),
            (ExtRat::Finite(_), ExtRat::Infinity) => Ordering::Less,
            (ExtRat::Infinity, ExtRat::Finite(_)) => Ordering::Greater,
            (ExtRat::Infinity, ExtRat::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::Finite(q) => fmt::Display::fmt(q, f),
            ExtRat::Infinity => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExtRat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "inf" {
            Ok(ExtRat::Infinity)
        } else {
            s.parse().map(ExtRat::Finite)
        }
    }
}

impl Serialize for ExtRat {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtRat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Least common multiple of the denominators.
pub fn lcm_denominators<'a>(qs: impl IntoIterator<Item = &'a Rat>) -> BigUint {
    qs.into_iter()
        .fold(BigUint::one(), |acc, q| acc.lcm(q.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    #[test]
    fn make_reduces() {
        assert_eq!(Rat::new(6u32, 4u32).unwrap(), r("3/2"));
        let z = Rat::new(0u32, 7u32).unwrap();
        assert_eq!(z.numer(), &BigUint::zero());
        assert_eq!(z.denom(), &BigUint::one());
        assert_eq!(Rat::new(81u32, 16u32).unwrap().to_string(), "81/16");
        assert!(matches!(Rat::new(1u32, 0u32), Err(Error::ZeroDenominator)));
    }

    #[test]
    fn num_den() {
        let (n, d) = r("3/2").num_den().unwrap();
        assert_eq!((n, d), (BigUint::from(3u32), BigUint::from(2u32)));
        let (n, d) = r("7").num_den().unwrap();
        assert_eq!((n, d), (BigUint::from(7u32), BigUint::one()));
        assert!(Rat::zero().num_den().is_err());
    }

    #[test]
    fn arithmetic() {
        assert_eq!(&r("1/2") + &r("1/3"), r("5/6"));
        assert_eq!(r("3/2").pow(4), r("81/16"));
        assert_eq!(r("2/3").cmp(&r("3/2")), Ordering::Less);
        assert_eq!(r("0").pow(0), Rat::one());
    }

    #[test]
    fn parse_rejects_junk() {
        for bad in ["", "/", "1/", "/2", " 1/2", "1/2 ", "-1/2", "1//2", "1.5", "1/0"] {
            assert!(bad.parse::<Rat>().is_err(), "{bad:?} parsed");
        }
        assert_eq!(r("5"), r("5/1"));
        assert_eq!(r("5").to_string(), "5/1");
    }

    #[test]
    fn ext_order() {
        let inf = ExtRat::Infinity;
        let big = ExtRat::Finite(Rat::from(u64::MAX).pow(3));
        assert!(big < inf);
        assert_eq!("inf".parse::<ExtRat>().unwrap(), inf);
    }

    #[test]
    fn huge_powers_are_exact() {
        let q = r("3/2").pow(200);
        assert_eq!(q.numer(), &BigUint::from(3u32).pow(200u32));
        assert_eq!(q.denom(), &BigUint::from(2u32).pow(200u32));
    }

    proptest! {
        #[test]
        fn make_is_canonical(a in 0u64..10_000, b in 1u64..10_000, k in 1u64..1000) {
            let q = Rat::new(a, b).unwrap();
            prop_assert_eq!(&q, &Rat::new(a * k, b * k).unwrap());
            prop_assert_eq!(&q, &Rat::new(q.numer().clone(), q.denom().clone()).unwrap());
            prop_assert!(q.numer().gcd(q.denom()).is_one());
        }

        #[test]
        fn ops_match_cross_multiplication(a in 0u64..5000, b in 1u64..5000, c in 0u64..5000, d in 1u64..5000) {
            let x = Rat::new(a, b).unwrap();
            let y = Rat::new(c, d).unwrap();
            let sum = &x + &y;
            let prod = &x * &y;
            let bd = BigUint::from(b) * BigUint::from(d);
            // sum·bd == a·d + c·b, prod·bd == a·c
            prop_assert_eq!(sum.numer() * &bd, (BigUint::from(a) * d + BigUint::from(c) * b) * sum.denom());
            prop_assert_eq!(prod.numer() * &bd, BigUint::from(a) * c * prod.denom());
            prop_assert_eq!(x.cmp(&y), (a as u128 * d as u128).cmp(&(c as u128 * b as u128)));
        }

        #[test]
        fn text_round_trip(a in 0u64..u64::MAX, b in 1u64..u64::MAX) {
            let q = Rat::new(a, b).unwrap();
            prop_assert_eq!(q.to_string().parse::<Rat>().unwrap(), q);
        }
    }
}
