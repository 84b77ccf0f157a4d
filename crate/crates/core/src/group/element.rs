use super::zint::ZInt;
use std::fmt;

/// A group element in canonical form.
///
/// Two elements of the same group are equal iff their encodings are
/// identical, and the derived `Ord` (lexicographic on the encoding) is the
/// canonical total order used as the tie-breaker everywhere downstream.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    /// Residue (cyclic) or coordinate vector (free abelian).
    Ints(Vec<i64>),
    /// Image array of a permutation of `0..degree`.
    Perm(Vec<u8>),
    /// Row-major square matrix with entries in `[0, q)`.
    Mat(Vec<u32>),
    /// Unitriangular integer matrix `[[1, x, z], [0, 1, y], [0, 0, 1]]`.
    Heis(ZInt, ZInt, ZInt),
    /// Freely reduced word of signed generator indices (`±1..=±rank`).
    Word(Vec<i8>),
    /// Component-wise element of a direct product.
    Tuple(Vec<Element>),
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Ints(v) if v.len() == 1 => write!(f, "{}", v[0]),
            Element::Ints(v) => write!(f, "{v:?}"),
            Element::Perm(p) => write!(f, "perm{p:?}"),
            Element::Mat(m) => write!(f, "mat{m:?}"),
            Element::Heis(x, y, z) => write!(f, "({x},{y},{z})"),
            Element::Word(w) => write!(f, "word{w:?}"),
            Element::Tuple(t) => f.debug_tuple("").field(t).finish(),
        }
    }
}
