//! Exact rational numbers.
//!
//! Values that fit a reduced `i64` pair stay inline; anything larger is
//! promoted to a `BigRational`. Both representations are kept canonical so
//! that equality, ordering and hashing never need to normalize.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed rational {0:?}")]
    Parse(String),
}

#[derive(Clone)]
enum Repr {
    /// Reduced, denominator positive.
    Small(i64, i64),
    /// Only used when the value does not fit `Small`.
    Big(Box<BigRational>),
}

/// An exact rational number, always stored in lowest terms with a positive
/// denominator.
#[derive(Clone)]
pub struct Rat(Repr);

impl Rat {
    pub const ZERO: Rat = Rat(Repr::Small(0, 1));
    pub const ONE: Rat = Rat(Repr::Small(1, 1));

    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Rat, RatError> {
        let den = den.into();
        if den.is_zero() {
            return Err(RatError::ZeroDenominator);
        }
        Ok(Rat::from_big(BigRational::new(num.into(), den)))
    }

    pub const fn int(n: i64) -> Rat {
        Rat(Repr::Small(n, 1))
    }

    /// `num/den` for small operands. Panics on a zero denominator.
    pub fn frac(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat::small(num as i128, den as i128)
    }

    fn small(num: i128, den: i128) -> Rat {
        if let (Ok(n), Ok(d)) = (i64::try_from(num), i64::try_from(den)) {
            if d == 1 {
                return Rat(Repr::Small(n, 1));
            }
            if n != i64::MIN && d != i64::MIN {
                let g = n.unsigned_abs().gcd(&d.unsigned_abs()) as i64;
                let (n, d) = (n / g, d / g);
                return if d < 0 { Rat(Repr::Small(-n, -d)) } else { Rat(Repr::Small(n, d)) };
            }
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rat(Repr::Small(n, d)),
            _ => Rat::from_big(BigRational::new(n.into(), d.into())),
        }
    }

    fn from_big(r: BigRational) -> Rat {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rat(Repr::Small(n, d)),
            _ => Rat(Repr::Big(Box::new(r))),
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw((*n).into(), (*d).into()),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => (*n).into(),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => (*d).into(),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(b) => {
                if b.is_positive() {
                    1
                } else if b.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    /// True when the reduced denominator divides `n`.
    pub fn denominator_divides(&self, n: u64) -> bool {
        match &self.0 {
            Repr::Small(_, d) => n.is_multiple_of(*d as u64),
            Repr::Big(b) => (BigInt::from(n) % b.denom()).is_zero(),
        }
    }

    /// The value as an `i64` if it is an integer in range.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n, 1) => Some(*n),
            _ => None,
        }
    }

    pub fn abs(&self) -> Rat {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn checked_div(&self, rhs: &Rat) -> Result<Rat, RatError> {
        if rhs.is_zero() {
            return Err(RatError::DivisionByZero);
        }
        Ok(match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => Rat::small(*a as i128 * *d as i128, *b as i128 * *c as i128),
            _ => Rat::from_big(self.to_big() / rhs.to_big()),
        })
    }

    pub fn recip(&self) -> Result<Rat, RatError> {
        Rat::ONE.checked_div(self)
    }
}

impl Default for Rat {
    fn default() -> Rat {
        Rat::ZERO
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::int(n)
    }
}

impl From<i32> for Rat {
    fn from(n: i32) -> Rat {
        Rat::int(n.into())
    }
}

impl From<u32> for Rat {
    fn from(n: u32) -> Rat {
        Rat::int(n.into())
    }
}

impl From<BigRational> for Rat {
    fn from(r: BigRational) -> Rat {
        Rat::from_big(r)
    }
}

impl From<Rat> for BigRational {
    fn from(r: Rat) -> BigRational {
        r.to_big()
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Rat) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            // canonical representations never overlap
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $small:expr, $big:expr) => {
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                match (&self.0, &rhs.0) {
                    (Repr::Small(a, b), Repr::Small(c, d)) => {
                        let f: fn(i128, i128, i128, i128) -> (i128, i128) = $small;
                        let (n, m) = f(*a as i128, *b as i128, *c as i128, *d as i128);
                        Rat::small(n, m)
                    }
                    _ => {
                        let f: fn(BigRational, BigRational) -> BigRational = $big;
                        Rat::from_big(f(self.to_big(), rhs.to_big()))
                    }
                }
            }
        }
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                (&self).$method(rhs)
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b, c, d| (a * d + c * b, b * d), |x, y| x + y);
binop!(Sub, sub, |a, b, c, d| (a * d - c * b, b * d), |x, y| x - y);
binop!(Mul, mul, |a, b, c, d| (a * c, b * d), |x, y| x * y);

impl Div<&Rat> for &Rat {
    type Output = Rat;
    /// Panics on division by zero; use [`Rat::checked_div`] when the divisor
    /// is not known to be nonzero.
    fn div(self, rhs: &Rat) -> Rat {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Div<Rat> for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        &self / &rhs
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match &self.0 {
            Repr::Small(n, d) => Rat::small(-(*n as i128), *d as i128),
            Repr::Big(b) => Rat::from_big(-(**b).clone()),
        }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::ZERO, |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::ZERO, |acc, x| acc + x)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.denom().is_one() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = RatError;

    /// Accepts `"p"` or `"p/q"` with an optional leading minus sign on `p`.
    fn from_str(s: &str) -> Result<Rat, RatError> {
        let bad = || RatError::Parse(s.to_owned());
        let int = |t: &str| -> Result<BigInt, RatError> {
            let digits = t.strip_prefix('-').unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse().map_err(|_| bad())
        };
        match s.split_once('/') {
            None => Ok(Rat::from_big(BigRational::from_integer(int(s)?))),
            Some((p, q)) => {
                if q.starts_with('-') {
                    return Err(bad());
                }
                Rat::new(int(p)?, int(q)?)
            }
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(s: &str) -> BigRational {
        let r: Rat = s.parse().unwrap();
        r.into()
    }

    #[test]
    fn reduces_and_normalizes_sign() {
        assert_eq!(Rat::frac(6, -4).to_string(), "-3/2");
        assert_eq!(Rat::frac(0, -7).to_string(), "0");
        assert_eq!(Rat::frac(9, 3).to_string(), "3");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0", "-4", "1/3", "-8/3", "123456789012345678901234567890/11"] {
            assert_eq!(s.parse::<Rat>().unwrap().to_string(), s);
        }
        assert_eq!("4/6".parse::<Rat>().unwrap().to_string(), "2/3");
        for bad in ["", "1/0", "a", "1/-3", "1/", "/2", "+1", "1.5", "--1"] {
            assert!(bad.parse::<Rat>().is_err(), "{bad}");
        }
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let m = Rat::int(i64::MAX);
        let sq = &m * &m;
        assert_eq!(sq.to_string(), (BigInt::from(i64::MAX) * BigInt::from(i64::MAX)).to_string());
        let back = sq.checked_div(&m).unwrap();
        assert_eq!(back, m);
        assert!(matches!(back.0, Repr::Small(..)));
        let min = Rat::int(i64::MIN);
        assert_eq!((-&min).to_string(), "9223372036854775808");
    }

    #[test]
    fn arithmetic_matches_bigrational() {
        let vals = ["0", "1", "-1", "1/3", "-2/3", "7/5", "-9223372036854775807", "9223372036854775807/2"];
        for a in vals {
            for b in vals {
                let (x, y): (Rat, Rat) = (a.parse().unwrap(), b.parse().unwrap());
                assert_eq!(BigRational::from(&x + &y), big(a) + big(b));
                assert_eq!(BigRational::from(&x - &y), big(a) - big(b));
                assert_eq!(BigRational::from(&x * &y), big(a) * big(b));
                assert_eq!(x.cmp(&y), big(a).cmp(&big(b)));
                if !y.is_zero() {
                    assert_eq!(BigRational::from(&x / &y), big(a) / big(b));
                }
            }
        }
    }

    #[test]
    fn denominators() {
        assert!(Rat::frac(-4, 3).denominator_divides(3));
        assert!(!Rat::frac(1, 2).denominator_divides(3));
        assert!(Rat::int(5).denominator_divides(1));
        assert_eq!(Rat::ZERO.checked_div(&Rat::ZERO), Err(RatError::DivisionByZero));
    }
}
