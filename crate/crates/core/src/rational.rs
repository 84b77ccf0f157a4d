//! Exact rationals with a stable JSON form `{"num": …, "den": …}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// Always stored in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(pub BigRational);

impl Rat {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rat {
        Rat(BigRational::new(num.into(), den.into()))
    }

    pub fn int(v: impl Into<BigInt>) -> Rat {
        Rat(BigRational::from_integer(v.into()))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn pow(&self, e: i32) -> Rat {
        Rat(num_traits::Pow::pow(&self.0, e))
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident) => {
        impl std::ops::$tr for Rat {
            type Output = Rat;
            fn $f(self, rhs: Rat) -> Rat {
                Rat(self.0.$f(rhs.0))
            }
        }
        impl std::ops::$tr<&Rat> for &Rat {
            type Output = Rat;
            fn $f(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$f(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `a`, `a/b` and decimal forms such as `1.25`.
impl FromStr for Rat {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Rat> {
        let bad = || crate::Error::InvalidInput(format!("`{s}` is not a rational number"));
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(Rat::new(n, d));
        }
        if let Some((ip, fp)) = s.split_once('.') {
            if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let neg = ip.starts_with('-');
            let whole: BigInt = if ip.is_empty() || ip == "-" {
                BigInt::zero()
            } else {
                ip.parse().map_err(|_| bad())?
            };
            let frac: BigInt = fp.parse().map_err(|_| bad())?;
            let scale = BigInt::from(10).pow(fp.len() as u32);
            let frac = if neg { -frac } else { frac };
            return Ok(Rat::new(whole * &scale + frac, scale));
        }
        Ok(Rat::int(s.parse::<BigInt>().map_err(|_| bad())?))
    }
}

fn int_json(v: &BigInt) -> serde_json::Value {
    match v.to_i64() {
        Some(x) => serde_json::Value::from(x),
        None => serde_json::Value::String(v.to_string()),
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("num", &int_json(self.0.numer()))?;
        m.serialize_entry("den", &int_json(self.0.denom()))?;
        m.end()
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Value::deserialize(d)?;
        let part = |x: &serde_json::Value| -> Option<BigInt> {
            match x {
                serde_json::Value::Number(n) => n.as_i64().map(BigInt::from),
                serde_json::Value::String(s) => s.parse().ok(),
                _ => None,
            }
        };
        match &v {
            serde_json::Value::Object(o) => {
                let n = o.get("num").and_then(part);
                let dd = o.get("den").and_then(part);
                match (n, dd) {
                    (Some(n), Some(dd)) if !dd.is_zero() => Ok(Rat::new(n, dd)),
                    _ => Err(D::Error::custom("expected {\"num\", \"den\"} with nonzero den")),
                }
            }
            serde_json::Value::String(s) => s.parse().map_err(D::Error::custom),
            serde_json::Value::Number(_) => part(&v)
                .map(Rat::int)
                .ok_or_else(|| D::Error::custom("expected an integer")),
            _ => Err(D::Error::custom("expected a rational")),
        }
    }
}
