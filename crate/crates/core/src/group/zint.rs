//! Arbitrary-precision integer with an inline fast path.
//!
//! Values that fit in `i64` are always stored as `Small`, so the
//! representation is canonical and the derived `Hash` agrees with `Eq`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ZInt {
    Small(i64),
    Big(BigInt),
}

impl ZInt {
    pub const ZERO: ZInt = ZInt::Small(0);

    fn from_big(b: BigInt) -> ZInt {
        match b.to_i64() {
            Some(v) => ZInt::Small(v),
            None => ZInt::Big(b),
        }
    }

    pub fn to_big(&self) -> BigInt {
        match self {
            ZInt::Small(v) => BigInt::from(*v),
            ZInt::Big(b) => b.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ZInt::Small(0))
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self {
            ZInt::Small(v) => Some(*v),
            ZInt::Big(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ZInt::Small(v) => *v as f64,
            ZInt::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl From<i64> for ZInt {
    fn from(v: i64) -> Self {
        ZInt::Small(v)
    }
}

impl From<BigInt> for ZInt {
    fn from(b: BigInt) -> Self {
        ZInt::from_big(b)
    }
}

impl Add for &ZInt {
    type Output = ZInt;
    fn add(self, rhs: &ZInt) -> ZInt {
        if let (ZInt::Small(a), ZInt::Small(b)) = (self, rhs) {
            if let Some(s) = a.checked_add(*b) {
                return ZInt::Small(s);
            }
        }
        ZInt::from_big(self.to_big() + rhs.to_big())
    }
}

impl Sub for &ZInt {
    type Output = ZInt;
    fn sub(self, rhs: &ZInt) -> ZInt {
        if let (ZInt::Small(a), ZInt::Small(b)) = (self, rhs) {
            if let Some(s) = a.checked_sub(*b) {
                return ZInt::Small(s);
            }
        }
        ZInt::from_big(self.to_big() - rhs.to_big())
    }
}

impl Mul for &ZInt {
    type Output = ZInt;
    fn mul(self, rhs: &ZInt) -> ZInt {
        if let (ZInt::Small(a), ZInt::Small(b)) = (self, rhs) {
            if let Some(s) = a.checked_mul(*b) {
                return ZInt::Small(s);
            }
        }
        ZInt::from_big(self.to_big() * rhs.to_big())
    }
}

impl Neg for &ZInt {
    type Output = ZInt;
    fn neg(self) -> ZInt {
        if let ZInt::Small(a) = self {
            if let Some(s) = a.checked_neg() {
                return ZInt::Small(s);
            }
        }
        ZInt::from_big(-self.to_big())
    }
}

impl Ord for ZInt {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ZInt::Small(a), ZInt::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for ZInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ZInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ZInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZInt::Small(v) => write!(f, "{v}"),
            ZInt::Big(b) => write!(f, "{b}"),
        }
    }
}

impl Default for ZInt {
    fn default() -> Self {
        ZInt::ZERO
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overflow_promotes_and_demotes() {
        let max = ZInt::from(i64::MAX);
        let one = ZInt::from(1);
        let big = &max + &one;
        assert!(matches!(big, ZInt::Big(_)));
        let back = &big - &one;
        assert_eq!(back, ZInt::Small(i64::MAX));
        assert!(big > max);
        let sq = &big * &big;
        assert_eq!(sq.to_big(), BigInt::from(i64::MAX as i128 + 1).pow(2));
        assert!(BigInt::from(0) < sq.to_big());
    }

    #[test]
    fn negation_of_min() {
        let m = ZInt::from(i64::MIN);
        let n = -&m;
        assert!(matches!(n, ZInt::Big(_)));
        assert_eq!(-&n, m);
    }
}
