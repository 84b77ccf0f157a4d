//! Ambient groups with exact arithmetic on canonical element encodings.

mod element;
mod literal;
pub mod perm;
mod spec;
pub mod zint;

pub use element::Element;
pub use spec::GroupSpec;
pub use zint::ZInt;

use crate::caps::Caps;
use crate::error::{Error, Result};
use num_integer::Integer;
use perm::StabChain;
use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

/// Element order: a positive integer or infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementOrder {
    Finite(u64),
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Mul,
    Inv,
    Canonicalize,
}

enum Kind {
    Cyclic(u64),
    Product(Vec<Group>),
    Perm {
        degree: usize,
        chain: StabChain,
    },
    Matrix {
        dim: usize,
        q: u64,
        members: HashSet<Element>,
    },
    Psl2(u64),
    Heisenberg,
    FreeAbelian(usize),
    Free(usize),
}

struct Inner {
    spec: GroupSpec,
    caps: Caps,
    kind: Kind,
    identity: Element,
    order: Option<u128>,
    abelian: bool,
}

/// Handle to an ambient group. Cheap to clone and safe to share across
/// threads; all arithmetic is pure.
#[derive(Clone)]
pub struct Group(Arc<Inner>);

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({:?})", self.0.spec)
    }
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for Group {}

impl Group {
    pub fn new(spec: GroupSpec) -> Result<Group> {
        Group::with_caps(spec, Caps::default())
    }

    pub fn with_caps(spec: GroupSpec, caps: Caps) -> Result<Group> {
        let (kind, identity) = match &spec {
            GroupSpec::Cyclic { n } => {
                if *n < 1 {
                    return Err(Error::spec("n", "cyclic order must be at least 1"));
                }
                (Kind::Cyclic(*n), Element::Ints(vec![0]))
            }
            GroupSpec::DirectProduct { factors } => {
                if factors.is_empty() {
                    return Err(Error::spec("factors", "direct product needs at least one factor"));
                }
                let groups = factors
                    .iter()
                    .map(|f| Group::with_caps(f.clone(), caps.clone()))
                    .collect::<Result<Vec<_>>>()?;
                let id = Element::Tuple(groups.iter().map(|g| g.identity().clone()).collect());
                (Kind::Product(groups), id)
            }
            GroupSpec::Permutation { degree, generators } => {
                if *degree < 1 || *degree > caps.max_perm_degree {
                    return Err(Error::cap(
                        format!("permutation degree {degree}"),
                        caps.max_perm_degree as u128,
                    ));
                }
                for g in generators {
                    if g.len() != *degree || !perm::is_permutation(g) {
                        return Err(Error::spec(
                            "generators",
                            format!("{g:?} is not a permutation of 0..{degree}"),
                        ));
                    }
                }
                let chain = StabChain::new(*degree, generators);
                (
                    Kind::Perm { degree: *degree, chain },
                    Element::Perm(perm::identity(*degree)),
                )
            }
            GroupSpec::MatrixModQ {
                dim,
                modulus,
                generators,
            } => {
                if *modulus < 2 {
                    return Err(Error::spec("modulus", "modulus must be at least 2"));
                }
                if *dim < 1 || *dim > caps.max_matrix_dim {
                    return Err(Error::cap(
                        format!("matrix dimension {dim}"),
                        caps.max_matrix_dim as u128,
                    ));
                }
                let id = Element::Mat(identity_matrix(*dim));
                let mut gens = Vec::new();
                for g in generators {
                    let flat: Vec<i64> = g.iter().flatten().copied().collect();
                    if g.len() != *dim || flat.len() != dim * dim {
                        return Err(Error::spec("generators", format!("{g:?} is not {dim}x{dim}")));
                    }
                    let m: Vec<u32> = flat.iter().map(|v| v.rem_euclid(*modulus as i64) as u32).collect();
                    if matrix_inverse(&m, *dim, *modulus).is_none() {
                        return Err(Error::spec(
                            "generators",
                            format!("{g:?} is not invertible mod {modulus}"),
                        ));
                    }
                    gens.push(m);
                }
                let members = matrix_closure(&gens, *dim, *modulus, caps.max_elements)?;
                (
                    Kind::Matrix {
                        dim: *dim,
                        q: *modulus,
                        members,
                    },
                    id,
                )
            }
            GroupSpec::Psl2 { p } => {
                if *p > caps.max_psl2_prime {
                    return Err(Error::cap(format!("psl2 prime {p}"), caps.max_psl2_prime as u128));
                }
                if *p < 3 || !is_prime(*p) {
                    return Err(Error::spec("p", format!("{p} is not an odd prime")));
                }
                (Kind::Psl2(*p), Element::Mat(vec![1, 0, 0, 1]))
            }
            GroupSpec::HeisenbergZ => (Kind::Heisenberg, Element::Heis(ZInt::ZERO, ZInt::ZERO, ZInt::ZERO)),
            GroupSpec::FreeAbelian { d } => {
                if *d < 1 {
                    return Err(Error::spec("d", "rank must be at least 1"));
                }
                (Kind::FreeAbelian(*d), Element::Ints(vec![0; *d]))
            }
            GroupSpec::FreeGroup { rank } => {
                if *rank < 1 || *rank > caps.max_free_rank {
                    return Err(Error::cap(
                        format!("free group rank {rank}"),
                        caps.max_free_rank as u128,
                    ));
                }
                (Kind::Free(*rank), Element::Word(Vec::new()))
            }
            GroupSpec::FpRing { .. } => {
                return Err(Error::spec(
                    "kind",
                    "fp-ring is a ring, not a group; only sum-product statistics accept it",
                ))
            }
        };

        let order = match &kind {
            Kind::Cyclic(n) => Some(*n as u128),
            Kind::Product(gs) => gs
                .iter()
                .map(|g| g.order())
                .try_fold(1u128, |acc, o| o.map(|o| acc * o)),
            Kind::Perm { chain, .. } => Some(chain.order()),
            Kind::Matrix { members, .. } => Some(members.len() as u128),
            Kind::Psl2(p) => {
                let p = *p as u128;
                Some(p * (p * p - 1) / 2)
            }
            Kind::Heisenberg | Kind::FreeAbelian(_) | Kind::Free(_) => None,
        };

        let mut group = Group(Arc::new(Inner {
            spec: spec.clone(),
            caps,
            kind,
            identity,
            order,
            abelian: false,
        }));
        let abelian = group.compute_abelian();
        Arc::get_mut(&mut group.0).expect("fresh handle").abelian = abelian;
        Ok(group)
    }

    fn compute_abelian(&self) -> bool {
        match &self.0.kind {
            Kind::Cyclic(_) | Kind::FreeAbelian(_) => true,
            Kind::Product(gs) => gs.iter().all(|g| g.is_abelian()),
            Kind::Psl2(_) | Kind::Heisenberg => false,
            Kind::Free(r) => *r == 1,
            Kind::Perm { .. } | Kind::Matrix { .. } => {
                let gens = self.standard_generators();
                gens.iter()
                    .all(|a| gens.iter().all(|b| self.mul(a, b) == self.mul(b, a)))
            }
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.0.spec
    }

    pub fn caps(&self) -> &Caps {
        &self.0.caps
    }

    pub fn identity(&self) -> &Element {
        &self.0.identity
    }

    pub fn is_finite(&self) -> bool {
        self.0.order.is_some()
    }

    /// Group order for finite kinds.
    pub fn order(&self) -> Option<u128> {
        self.0.order
    }

    pub fn is_abelian(&self) -> bool {
        self.0.abelian
    }

    pub fn same_as(&self, other: &Group) -> bool {
        self == other
    }

    /// Group law. Both arguments must be canonical elements of this group.
    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        match (&self.0.kind, a, b) {
            (Kind::Cyclic(n), Element::Ints(x), Element::Ints(y)) => {
                let n = *n as i64;
                Element::Ints(vec![(x[0] + y[0]).rem_euclid(n)])
            }
            (Kind::FreeAbelian(_), Element::Ints(x), Element::Ints(y)) => {
                Element::Ints(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (Kind::Product(gs), Element::Tuple(x), Element::Tuple(y)) => {
                Element::Tuple(gs.iter().zip(x.iter().zip(y)).map(|(g, (p, q))| g.mul(p, q)).collect())
            }
            (Kind::Perm { .. }, Element::Perm(x), Element::Perm(y)) => Element::Perm(perm::compose(x, y)),
            (Kind::Matrix { dim, q, .. }, Element::Mat(x), Element::Mat(y)) => Element::Mat(matrix_mul(x, y, *dim, *q)),
            (Kind::Psl2(p), Element::Mat(x), Element::Mat(y)) => {
                let mut m = matrix_mul(x, y, 2, *p);
                psl2_normalize(&mut m, *p);
                Element::Mat(m)
            }
            (Kind::Heisenberg, Element::Heis(x1, y1, z1), Element::Heis(x2, y2, z2)) => {
                let z = &(z1 + z2) + &(x1 * y2);
                Element::Heis(x1 + x2, y1 + y2, z)
            }
            (Kind::Free(_), Element::Word(x), Element::Word(y)) => Element::Word(free_concat(x, y)),
            _ => panic!("element kind does not match group {:?}", self.0.spec),
        }
    }

    pub fn inv(&self, a: &Element) -> Element {
        match (&self.0.kind, a) {
            (Kind::Cyclic(n), Element::Ints(x)) => Element::Ints(vec![(-x[0]).rem_euclid(*n as i64)]),
            (Kind::FreeAbelian(_), Element::Ints(x)) => Element::Ints(x.iter().map(|v| -v).collect()),
            (Kind::Product(gs), Element::Tuple(x)) => Element::Tuple(gs.iter().zip(x).map(|(g, p)| g.inv(p)).collect()),
            (Kind::Perm { .. }, Element::Perm(x)) => Element::Perm(perm::inverse(x)),
            (Kind::Matrix { dim, q, .. }, Element::Mat(x)) => {
                Element::Mat(matrix_inverse(x, *dim, *q).expect("group elements are invertible"))
            }
            (Kind::Psl2(p), Element::Mat(x)) => {
                // inverse of [[a,b],[c,d]] with det 1 is [[d,-b],[-c,a]]
                let p32 = *p as u32;
                let neg = |v: u32| (p32 - v) % p32;
                let mut m = vec![x[3], neg(x[1]), neg(x[2]), x[0]];
                psl2_normalize(&mut m, *p);
                Element::Mat(m)
            }
            (Kind::Heisenberg, Element::Heis(x, y, z)) => {
                // (x,y,z)^{-1} = (-x, -y, xy - z)
                Element::Heis(-x, -y, &(x * y) - z)
            }
            (Kind::Free(_), Element::Word(w)) => Element::Word(w.iter().rev().map(|g| -g).collect()),
            _ => panic!("element kind does not match group {:?}", self.0.spec),
        }
    }

    pub fn pow(&self, g: &Element, k: i64) -> Element {
        let base = if k < 0 { self.inv(g) } else { g.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.identity().clone();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    /// Commutator `[g, h] = g⁻¹h⁻¹gh`.
    pub fn commutator(&self, g: &Element, h: &Element) -> Element {
        let gi = self.inv(g);
        let hi = self.inv(h);
        self.mul(&self.mul(&gi, &hi), &self.mul(g, h))
    }

    /// Bring a raw element of the right shape into canonical form.
    pub fn canonicalize(&self, raw: &Element) -> Result<Element> {
        let bad = || Error::NotInGroup(format!("{raw:?}"));
        Ok(match (&self.0.kind, raw) {
            (Kind::Cyclic(n), Element::Ints(x)) if x.len() == 1 => Element::Ints(vec![x[0].rem_euclid(*n as i64)]),
            (Kind::FreeAbelian(d), Element::Ints(x)) if x.len() == *d => raw.clone(),
            (Kind::Product(gs), Element::Tuple(x)) if x.len() == gs.len() => Element::Tuple(
                gs.iter()
                    .zip(x)
                    .map(|(g, p)| g.canonicalize(p))
                    .collect::<Result<_>>()?,
            ),
            (Kind::Perm { degree, chain }, Element::Perm(x)) => {
                if x.len() != *degree || !chain.contains(x) {
                    return Err(bad());
                }
                raw.clone()
            }
            (Kind::Matrix { dim, q, members }, Element::Mat(x)) if x.len() == dim * dim => {
                let m = Element::Mat(x.iter().map(|v| v % *q as u32).collect());
                if !members.contains(&m) {
                    return Err(bad());
                }
                m
            }
            (Kind::Psl2(p), Element::Mat(x)) if x.len() == 4 => {
                let mut m: Vec<u32> = x.iter().map(|v| v % *p as u32).collect();
                let det = (m[0] as u64 * m[3] as u64 + (*p - 1) * ((m[1] as u64 * m[2] as u64) % p)) % p;
                if det != 1 {
                    return Err(bad());
                }
                psl2_normalize(&mut m, *p);
                Element::Mat(m)
            }
            (Kind::Heisenberg, Element::Heis(..)) => raw.clone(),
            (Kind::Free(r), Element::Word(w)) => {
                if w.iter().any(|&g| g == 0 || g.unsigned_abs() as usize > *r) {
                    return Err(bad());
                }
                Element::Word(free_concat(&[], w))
            }
            _ => return Err(bad()),
        })
    }

    /// Check that `e` is a canonical element of this group.
    pub fn check(&self, e: &Element) -> Result<()> {
        let c = self.canonicalize(e)?;
        if &c != e {
            return Err(Error::NotCanonical(format!("{e:?} (canonical form {c:?})")));
        }
        Ok(())
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.check(e).is_ok()
    }

    /// Checked arithmetic entry point used by external callers.
    pub fn arith(&self, op: ArithOp, args: &[Element]) -> Result<Element> {
        match op {
            ArithOp::Canonicalize => {
                let [a] = args else {
                    return Err(Error::InvalidInput("canonicalize takes one argument".into()));
                };
                self.canonicalize(a)
            }
            ArithOp::Inv => {
                let [a] = args else {
                    return Err(Error::InvalidInput("inv takes one argument".into()));
                };
                self.check(a)?;
                Ok(self.inv(a))
            }
            ArithOp::Mul => {
                let [a, b] = args else {
                    return Err(Error::InvalidInput("mul takes two arguments".into()));
                };
                self.check(a)?;
                self.check(b)?;
                Ok(self.mul(a, b))
            }
        }
    }

    /// Least `n ≥ 1` with `gⁿ = e`, or infinite. Finite groups always
    /// terminate; infinite kinds are torsion-free except at the identity.
    pub fn element_order(&self, g: &Element) -> ElementOrder {
        if g == self.identity() {
            return ElementOrder::Finite(1);
        }
        match &self.0.kind {
            Kind::Heisenberg | Kind::FreeAbelian(_) | Kind::Free(_) => return ElementOrder::Infinite,
            Kind::Product(gs) => {
                let Element::Tuple(parts) = g else {
                    return ElementOrder::Infinite;
                };
                let mut l = 1u64;
                for (grp, p) in gs.iter().zip(parts) {
                    match grp.element_order(p) {
                        ElementOrder::Finite(o) => l = l.lcm(&o),
                        ElementOrder::Infinite => return ElementOrder::Infinite,
                    }
                }
                return ElementOrder::Finite(l);
            }
            _ => {}
        }
        let cap = self.order().unwrap_or(u128::MAX).min(self.caps().max_elements as u128) as u64;
        let mut x = g.clone();
        for n in 1..=cap {
            if &x == self.identity() {
                return ElementOrder::Finite(n);
            }
            x = self.mul(&x, g);
        }
        ElementOrder::Infinite
    }

    /// Canonical generators used when a command does not supply its own.
    pub fn standard_generators(&self) -> Vec<Element> {
        match &self.0.kind {
            Kind::Cyclic(n) => vec![Element::Ints(vec![1 % *n as i64])],
            Kind::FreeAbelian(d) => (0..*d)
                .map(|i| {
                    let mut v = vec![0; *d];
                    v[i] = 1;
                    Element::Ints(v)
                })
                .collect(),
            Kind::Product(gs) => {
                let mut out = Vec::new();
                for (i, g) in gs.iter().enumerate() {
                    for s in g.standard_generators() {
                        let mut parts: Vec<Element> = gs.iter().map(|h| h.identity().clone()).collect();
                        parts[i] = s;
                        out.push(Element::Tuple(parts));
                    }
                }
                out
            }
            Kind::Perm { .. } => match &self.0.spec {
                GroupSpec::Permutation { generators, .. } => {
                    generators.iter().map(|g| Element::Perm(g.clone())).collect()
                }
                _ => unreachable!(),
            },
            Kind::Matrix { q, .. } => match &self.0.spec {
                GroupSpec::MatrixModQ { generators, .. } => generators
                    .iter()
                    .map(|g| Element::Mat(g.iter().flatten().map(|v| v.rem_euclid(*q as i64) as u32).collect()))
                    .collect(),
                _ => unreachable!(),
            },
            Kind::Psl2(_) => vec![Element::Mat(vec![1, 1, 0, 1]), Element::Mat(vec![1, 0, 1, 1])],
            Kind::Heisenberg => vec![
                Element::Heis(ZInt::from(1), ZInt::ZERO, ZInt::ZERO),
                Element::Heis(ZInt::ZERO, ZInt::from(1), ZInt::ZERO),
            ],
            Kind::Free(r) => (1..=*r as i8).map(|i| Element::Word(vec![i])).collect(),
        }
    }

    /// Abelianization coordinates in `R^q / Z^q` for groups that map onto a
    /// torus: cyclic factors `Z/n → R/Z` and the unitriangular matrix group
    /// mod `n` via its two off-diagonal corner entries. Returns `None` when no
    /// such map is built in.
    pub fn torus_coordinates(&self, g: &Element) -> Option<Vec<f64>> {
        match (&self.0.kind, g) {
            (Kind::Cyclic(n), Element::Ints(x)) => Some(vec![x[0] as f64 / *n as f64]),
            (Kind::Product(gs), Element::Tuple(parts)) => {
                let mut out = Vec::new();
                for (grp, p) in gs.iter().zip(parts) {
                    out.extend(grp.torus_coordinates(p)?);
                }
                Some(out)
            }
            (Kind::Matrix { dim: 3, q, .. }, Element::Mat(m)) if is_unitriangular(m) => {
                Some(vec![m[1] as f64 / *q as f64, m[5] as f64 / *q as f64])
            }
            _ => None,
        }
    }

    /// Integer torus coordinates and their moduli, exact counterpart of
    /// [`Group::torus_coordinates`].
    pub fn torus_lattice(&self, g: &Element) -> Option<Vec<(i64, u64)>> {
        match (&self.0.kind, g) {
            (Kind::Cyclic(n), Element::Ints(x)) => Some(vec![(x[0], *n)]),
            (Kind::Product(gs), Element::Tuple(parts)) => {
                let mut out = Vec::new();
                for (grp, p) in gs.iter().zip(parts) {
                    out.extend(grp.torus_lattice(p)?);
                }
                Some(out)
            }
            (Kind::Matrix { dim: 3, q, .. }, Element::Mat(m)) if is_unitriangular(m) => {
                Some(vec![(m[1] as i64, *q), (m[5] as i64, *q)])
            }
            _ => None,
        }
    }

    /// Enumerate every element of a finite group in canonical order.
    pub fn elements(&self) -> Result<Vec<Element>> {
        let order = self
            .order()
            .ok_or_else(|| Error::Precondition("cannot enumerate an infinite group".into()))?;
        if order > self.caps().max_elements as u128 {
            return Err(Error::cap(
                format!("enumerating group of order {order}"),
                self.caps().max_elements,
            ));
        }
        let mut out: Vec<Element> = match &self.0.kind {
            Kind::Cyclic(n) => (0..*n as i64).map(|r| Element::Ints(vec![r])).collect(),
            Kind::Matrix { members, .. } => members.iter().cloned().collect(),
            _ => {
                let gens = self.standard_generators();
                let mut seen: HashSet<Element> = HashSet::new();
                seen.insert(self.identity().clone());
                let mut queue = VecDeque::from([self.identity().clone()]);
                while let Some(x) = queue.pop_front() {
                    for s in &gens {
                        for y in [self.mul(&x, s), self.mul(&x, &self.inv(s))] {
                            if seen.insert(y.clone()) {
                                queue.push_back(y);
                            }
                        }
                    }
                }
                seen.into_iter().collect()
            }
        };
        out.sort();
        if out.len() as u128 != order {
            return Err(Error::violation(
                "standard generators generate the whole group",
                serde_json::json!({"expected": order.to_string(), "found": out.len()}),
            ));
        }
        Ok(out)
    }
}

fn is_unitriangular(m: &[u32]) -> bool {
    m.len() == 9 && m[0] == 1 && m[4] == 1 && m[8] == 1 && m[3] == 0 && m[6] == 0 && m[7] == 0
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn identity_matrix(dim: usize) -> Vec<u32> {
    let mut m = vec![0; dim * dim];
    for i in 0..dim {
        m[i * dim + i] = 1;
    }
    m
}

fn matrix_mul(a: &[u32], b: &[u32], dim: usize, q: u64) -> Vec<u32> {
    let mut out = vec![0u32; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut s = 0u64;
            for k in 0..dim {
                s += a[i * dim + k] as u64 * b[k * dim + j] as u64;
            }
            out[i * dim + j] = (s % q) as u32;
        }
    }
    out
}

fn det_i128(m: &[i128], dim: usize) -> i128 {
    match dim {
        0 => 1,
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        _ => {
            let mut total = 0i128;
            for col in 0..dim {
                let minor = minor(m, dim, 0, col);
                let sign = if col % 2 == 0 { 1 } else { -1 };
                total += sign * m[col] * det_i128(&minor, dim - 1);
            }
            total
        }
    }
}

fn minor(m: &[i128], dim: usize, row: usize, col: usize) -> Vec<i128> {
    let mut out = Vec::with_capacity((dim - 1) * (dim - 1));
    for i in 0..dim {
        for j in 0..dim {
            if i != row && j != col {
                out.push(m[i * dim + j]);
            }
        }
    }
    out
}

/// Inverse mod `q` via the adjugate, or `None` when the determinant is not a
/// unit.
fn matrix_inverse(m: &[u32], dim: usize, q: u64) -> Option<Vec<u32>> {
    let mi: Vec<i128> = m.iter().map(|&v| v as i128).collect();
    let det = det_i128(&mi, dim).rem_euclid(q as i128) as i64;
    let inv_det = mod_inverse(det, q as i64)?;
    let mut out = vec![0u32; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            // adj[i][j] = (-1)^{i+j} det(minor(j, i))
            let cof = if dim == 1 {
                1
            } else {
                det_i128(&minor(&mi, dim, j, i), dim - 1)
            };
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            let v = (sign * cof).rem_euclid(q as i128) * inv_det as i128;
            out[i * dim + j] = v.rem_euclid(q as i128) as u32;
        }
    }
    Some(out)
}

pub(crate) fn mod_inverse(a: i64, q: i64) -> Option<i64> {
    let e = a.rem_euclid(q).extended_gcd(&q);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(q))
}

fn matrix_closure(gens: &[Vec<u32>], dim: usize, q: u64, cap: usize) -> Result<HashSet<Element>> {
    let id = Element::Mat(identity_matrix(dim));
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([identity_matrix(dim)]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = matrix_mul(&x, g, dim, q);
            if seen.insert(Element::Mat(y.clone())) {
                if seen.len() > cap {
                    return Err(Error::cap("matrix group closure", cap));
                }
                queue.push_back(y);
            }
        }
    }
    Ok(seen)
}

/// Scale by ±1 so the first nonzero entry lies in `1..=(p-1)/2`.
fn psl2_normalize(m: &mut [u32], p: u64) {
    let half = ((p - 1) / 2) as u32;
    if let Some(&first) = m.iter().find(|&&v| v != 0) {
        if first > half {
            for v in m.iter_mut() {
                if *v != 0 {
                    *v = p as u32 - *v;
                }
            }
        }
    }
}

/// Concatenate two reduced words and cancel at the seam.
fn free_concat(a: &[i8], b: &[i8]) -> Vec<i8> {
    let mut out: Vec<i8> = Vec::with_capacity(a.len() + b.len());
    for &g in a.iter().chain(b) {
        if out.last() == Some(&-g) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(x: i64, y: i64, z: i64) -> Element {
        Element::Heis(x.into(), y.into(), z.into())
    }

    #[test]
    fn heisenberg_law() {
        let g = Group::new(GroupSpec::HeisenbergZ).unwrap();
        assert_eq!(g.mul(&h(1, 0, 0), &h(0, 1, 0)), h(1, 1, 1));
        assert_eq!(g.inv(&h(1, 1, 1)), h(-1, -1, 0));
        assert_eq!(g.commutator(&h(1, 0, 0), &h(0, 1, 0)), h(0, 0, 1));
        assert_eq!(g.element_order(&h(1, 0, 0)), ElementOrder::Infinite);
    }

    #[test]
    fn free_group_cancellation() {
        let g = Group::new(GroupSpec::FreeGroup { rank: 2 }).unwrap();
        assert_eq!(
            g.mul(&Element::Word(vec![1]), &Element::Word(vec![-1])),
            Element::Word(vec![])
        );
        assert_eq!(
            g.canonicalize(&Element::Word(vec![1, 2, -2, -1, 2])).unwrap(),
            Element::Word(vec![2])
        );
        assert!(g.check(&Element::Word(vec![1, -1])).is_err());
        assert!(g.check(&Element::Word(vec![3])).is_err());
    }

    #[test]
    fn orders() {
        assert_eq!(Group::new(GroupSpec::Cyclic { n: 6 }).unwrap().order(), Some(6));
        assert_eq!(Group::new(GroupSpec::Psl2 { p: 5 }).unwrap().order(), Some(60));
        assert_eq!(Group::new(GroupSpec::symmetric(5)).unwrap().order(), Some(120));
        assert_eq!(Group::new(GroupSpec::dihedral(4)).unwrap().order(), Some(8));
        assert_eq!(Group::new(GroupSpec::quaternion()).unwrap().order(), Some(8));
        assert_eq!(Group::new(GroupSpec::heisenberg_mod(5)).unwrap().order(), Some(125));
        let free = Group::new(GroupSpec::FreeGroup { rank: 2 }).unwrap();
        assert!(!free.is_finite());
    }

    #[test]
    fn quaternion_is_not_dihedral() {
        let q8 = Group::new(GroupSpec::quaternion()).unwrap();
        let elems = q8.elements().unwrap();
        let involutions = elems
            .iter()
            .filter(|e| q8.element_order(e) == ElementOrder::Finite(2))
            .count();
        assert_eq!(involutions, 1);
        let d4 = Group::new(GroupSpec::dihedral(4)).unwrap();
        let inv_d4 = d4
            .elements()
            .unwrap()
            .iter()
            .filter(|e| d4.element_order(e) == ElementOrder::Finite(2))
            .count();
        assert_eq!(inv_d4, 5);
    }

    #[test]
    fn psl2_canonical_sign() {
        let g = Group::new(GroupSpec::Psl2 { p: 7 }).unwrap();
        // -I normalizes to I
        assert_eq!(g.canonicalize(&Element::Mat(vec![6, 0, 0, 6])).unwrap(), *g.identity());
        assert!(g.canonicalize(&Element::Mat(vec![1, 1, 1, 1])).is_err());
        let u = Element::Mat(vec![1, 1, 0, 1]);
        assert_eq!(g.mul(&u, &g.inv(&u)), *g.identity());
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!(
            Group::new(GroupSpec::Psl2 { p: 9 }),
            Err(Error::InvalidSpec { .. })
        ));
        assert!(matches!(
            Group::new(GroupSpec::Psl2 { p: 103 }),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(
            Group::new(GroupSpec::FpRing { p: 7 }),
            Err(Error::InvalidSpec { .. })
        ));
        let singular = GroupSpec::MatrixModQ {
            dim: 2,
            modulus: 6,
            generators: vec![vec![vec![2, 0], vec![0, 1]]],
        };
        assert!(matches!(Group::new(singular), Err(Error::InvalidSpec { .. })));
    }

    #[test]
    fn matrix_inverse_composite_modulus() {
        let m = vec![1u32, 2, 3, 5];
        let inv = matrix_inverse(&m, 2, 6).unwrap();
        assert_eq!(matrix_mul(&m, &inv, 2, 6), identity_matrix(2));
    }
}
