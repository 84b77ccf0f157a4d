//! JSON element literals.
//!
//! | kind | literal |
//! |---|---|
//! | cyclic | `3` or `[3]` |
//! | free-abelian | `[a, b, …]` |
//! | permutation | image array `[1, 0, 2]` |
//! | matrix-mod-q, psl2 | rows `[[1, 1], [0, 1]]` |
//! | heisenberg-z | `[x, y, z]`; entries beyond `i64` as decimal strings |
//! | free-group | signed generator indices `[1, -2]` |
//! | direct-product | array of component literals |

use super::{Element, Group, Kind, ZInt};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use serde_json::Value;

fn bad(v: &Value, why: &str) -> Error {
    Error::InvalidInput(format!("element literal {v}: {why}"))
}

fn int(v: &Value) -> Result<i64> {
    v.as_i64().ok_or_else(|| bad(v, "expected an integer"))
}

fn array(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| bad(v, "expected an array"))
}

fn zint(v: &Value) -> Result<ZInt> {
    match v {
        Value::Number(_) => Ok(ZInt::from(int(v)?)),
        Value::String(s) => s
            .parse::<BigInt>()
            .map(ZInt::from)
            .map_err(|_| bad(v, "expected a decimal integer")),
        _ => Err(bad(v, "expected an integer")),
    }
}

fn zint_json(z: &ZInt) -> Value {
    match z.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(z.to_string()),
    }
}

impl Group {
    /// Parse a literal into a raw element of the right shape (not yet
    /// canonicalized).
    pub fn parse_raw(&self, v: &Value) -> Result<Element> {
        Ok(match &self.0.kind {
            Kind::Cyclic(_) => match v {
                Value::Array(a) if a.len() == 1 => Element::Ints(vec![int(&a[0])?]),
                _ => Element::Ints(vec![int(v)?]),
            },
            Kind::FreeAbelian(_) => Element::Ints(array(v)?.iter().map(int).collect::<Result<_>>()?),
            Kind::Perm { .. } => Element::Perm(
                array(v)?
                    .iter()
                    .map(|x| {
                        let i = int(x)?;
                        u8::try_from(i).map_err(|_| bad(v, "point out of range"))
                    })
                    .collect::<Result<_>>()?,
            ),
            Kind::Matrix { q, .. } | Kind::Psl2(q) => {
                let mut flat = Vec::new();
                for row in array(v)? {
                    match row {
                        Value::Array(r) => {
                            for x in r {
                                flat.push(int(x)?.rem_euclid(*q as i64) as u32);
                            }
                        }
                        _ => flat.push(int(row)?.rem_euclid(*q as i64) as u32),
                    }
                }
                Element::Mat(flat)
            }
            Kind::Heisenberg => {
                let a = array(v)?;
                if a.len() != 3 {
                    return Err(bad(v, "expected [x, y, z]"));
                }
                Element::Heis(zint(&a[0])?, zint(&a[1])?, zint(&a[2])?)
            }
            Kind::Free(_) => Element::Word(
                array(v)?
                    .iter()
                    .map(|x| i8::try_from(int(x)?).map_err(|_| bad(v, "generator index out of range")))
                    .collect::<Result<_>>()?,
            ),
            Kind::Product(gs) => {
                let a = array(v)?;
                if a.len() != gs.len() {
                    return Err(bad(v, "wrong number of components"));
                }
                Element::Tuple(gs.iter().zip(a).map(|(g, x)| g.parse_raw(x)).collect::<Result<_>>()?)
            }
        })
    }

    /// Parse a literal and require it to already be canonical.
    pub fn parse_element(&self, v: &Value) -> Result<Element> {
        let e = self.parse_raw(v)?;
        self.check(&e)?;
        Ok(e)
    }

    /// Parse a literal and canonicalize it.
    pub fn parse_canonical(&self, v: &Value) -> Result<Element> {
        self.canonicalize(&self.parse_raw(v)?)
    }

    pub fn to_json(&self, e: &Element) -> Value {
        match (&self.0.kind, e) {
            (Kind::Cyclic(_), Element::Ints(x)) => Value::from(x[0]),
            (Kind::Matrix { dim, .. }, Element::Mat(m)) => {
                Value::Array(m.chunks(*dim).map(|r| Value::from(r.to_vec())).collect())
            }
            (Kind::Psl2(_), Element::Mat(m)) => Value::Array(m.chunks(2).map(|r| Value::from(r.to_vec())).collect()),
            (Kind::Product(gs), Element::Tuple(parts)) => {
                Value::Array(gs.iter().zip(parts).map(|(g, p)| g.to_json(p)).collect())
            }
            (_, Element::Ints(x)) => Value::from(x.clone()),
            (_, Element::Perm(p)) => Value::from(p.clone()),
            (_, Element::Heis(x, y, z)) => Value::Array(vec![zint_json(x), zint_json(y), zint_json(z)]),
            (_, Element::Word(w)) => Value::from(w.iter().map(|&g| g as i64).collect::<Vec<_>>()),
            (_, other) => Value::String(format!("{other:?}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use serde_json::json;

    #[test]
    fn round_trips() {
        let cases = [
            (GroupSpec::Cyclic { n: 6 }, json!(5)),
            (GroupSpec::Psl2 { p: 5 }, json!([[1, 1], [0, 1]])),
            (GroupSpec::HeisenbergZ, json!([1, -2, "123456789012345678901234567890"])),
            (GroupSpec::FreeGroup { rank: 2 }, json!([1, -2, 1])),
            (GroupSpec::symmetric(3), json!([1, 0, 2])),
            (
                GroupSpec::DirectProduct {
                    factors: vec![GroupSpec::Cyclic { n: 2 }, GroupSpec::FreeAbelian { d: 2 }],
                },
                json!([1, [3, -4]]),
            ),
        ];
        for (spec, lit) in cases {
            let g = Group::new(spec).unwrap();
            let e = g.parse_element(&lit).unwrap();
            assert_eq!(g.to_json(&e), lit);
        }
    }

    #[test]
    fn rejects_non_canonical() {
        let g = Group::new(GroupSpec::Cyclic { n: 6 }).unwrap();
        assert!(matches!(g.parse_element(&json!(7)), Err(Error::NotCanonical(_))));
        assert_eq!(g.parse_canonical(&json!(7)).unwrap(), Element::Ints(vec![1]));
        let f = Group::new(GroupSpec::FreeGroup { rank: 2 }).unwrap();
        assert!(f.parse_element(&json!([1, -1])).is_err());
    }
}
