//! Finite sets of canonical elements and the product-set engine.

use crate::error::{Error, Result};
use crate::group::{Element, Group};
use indexmap::IndexSet;
use rayon::prelude::*;
use rustc_hash::{FxBuildHasher, FxHashSet};
use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

/// Products with at least this many pairs are split across the thread pool.
const PAR_THRESHOLD: usize = 1 << 16;

/// An immutable finite subset of one group, stored in canonical order.
#[derive(Clone)]
pub struct ElementSet {
    group: Group,
    items: Arc<IndexSet<Element, FxBuildHasher>>,
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.items.iter()).finish()
    }
}

impl serde::Serialize for ElementSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl PartialEq for ElementSet {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.items.as_slice() == other.items.as_slice()
    }
}

impl Eq for ElementSet {}

impl ElementSet {
    /// Build from elements that must already be canonical members of `group`.
    pub fn new(group: &Group, elems: impl IntoIterator<Item = Element>) -> Result<Self> {
        let v: Vec<Element> = elems.into_iter().collect();
        for e in &v {
            group.check(e)?;
        }
        Ok(Self::from_trusted(group, v))
    }

    /// Build from elements known to be canonical; sorts and deduplicates.
    pub(crate) fn from_trusted(group: &Group, mut v: Vec<Element>) -> Self {
        v.sort_unstable();
        v.dedup();
        ElementSet {
            group: group.clone(),
            items: Arc::new(v.into_iter().collect()),
        }
    }

    pub fn empty(group: &Group) -> Self {
        Self::from_trusted(group, Vec::new())
    }

    pub fn singleton(group: &Group, e: Element) -> Self {
        Self::from_trusted(group, vec![e])
    }

    /// All elements of a finite group.
    pub fn whole(group: &Group) -> Result<Self> {
        Ok(Self::from_trusted(group, group.elements()?))
    }

    /// Parse a JSON array of element literals, canonicalizing each.
    pub fn from_json(group: &Group, v: &serde_json::Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::InvalidInput("a set literal must be a JSON array".into()))?;
        let elems = arr
            .iter()
            .map(|x| group.parse_canonical(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_trusted(group, elems))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.iter().map(|e| self.group.to_json(e)).collect())
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.items.contains(e)
    }

    pub fn index_of(&self, e: &Element) -> Option<usize> {
        self.items.get_index_of(e)
    }

    pub fn get(&self, i: usize) -> Option<&Element> {
        self.items.get_index(i)
    }

    /// Elements in canonical order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = &Element> + '_ {
        self.items.iter()
    }

    pub fn to_vec(&self) -> Vec<Element> {
        self.items.iter().cloned().collect()
    }

    /// Canonical-least element.
    pub fn first(&self) -> Option<&Element> {
        self.items.first()
    }

    pub fn same_group(&self, other: &ElementSet) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        Ok(())
    }

    pub fn contains_identity(&self) -> bool {
        self.contains(self.group.identity())
    }

    pub fn is_symmetric(&self) -> bool {
        self.iter().all(|a| self.contains(&self.group.inv(a)))
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.len() <= other.len() && self.iter().all(|a| other.contains(a))
    }

    /// `A⁻¹`.
    pub fn inverse(&self) -> ElementSet {
        Self::from_trusted(&self.group, self.iter().map(|a| self.group.inv(a)).collect())
    }

    /// `A ∪ A⁻¹ ∪ {1}`.
    pub fn symmetrize(&self) -> ElementSet {
        let mut v: Vec<Element> = self.to_vec();
        v.extend(self.iter().map(|a| self.group.inv(a)));
        v.push(self.group.identity().clone());
        Self::from_trusted(&self.group, v)
    }

    pub fn intersection(&self, other: &ElementSet) -> Result<ElementSet> {
        self.same_group(other)?;
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        Ok(Self::from_trusted(
            &self.group,
            small.iter().filter(|a| big.contains(a)).cloned().collect(),
        ))
    }

    pub fn union(&self, other: &ElementSet) -> Result<ElementSet> {
        self.same_group(other)?;
        Ok(Self::from_trusted(
            &self.group,
            self.iter().chain(other.iter()).cloned().collect(),
        ))
    }

    /// `gA`.
    pub fn left_translate(&self, g: &Element) -> ElementSet {
        Self::from_trusted(&self.group, self.iter().map(|a| self.group.mul(g, a)).collect())
    }

    /// `Ag`.
    pub fn right_translate(&self, g: &Element) -> ElementSet {
        Self::from_trusted(&self.group, self.iter().map(|a| self.group.mul(a, g)).collect())
    }

    /// `gAg⁻¹`.
    pub fn conjugate(&self, g: &Element) -> ElementSet {
        let gi = self.group.inv(g);
        Self::from_trusted(
            &self.group,
            self.iter()
                .map(|a| self.group.mul(&self.group.mul(g, a), &gi))
                .collect(),
        )
    }

    /// Product set `AB = {ab : a ∈ A, b ∈ B}`.
    pub fn product(&self, other: &ElementSet) -> Result<ElementSet> {
        self.same_group(other)?;
        let caps = self.group.caps();
        let work = self.len() as u128 * other.len() as u128;
        if work > caps.max_work as u128 {
            return Err(Error::cap(
                format!("product of sets of sizes {} and {}", self.len(), other.len()),
                caps.max_work,
            ));
        }
        let g = &self.group;
        let a: Vec<&Element> = self.iter().collect();
        let b: Vec<&Element> = other.iter().collect();
        let hint = (work as usize).min(caps.max_elements);
        // Iterate the smaller factor on the outside.
        let outer_is_a = a.len() <= b.len();
        let row = |x: &Element| -> Vec<Element> {
            if outer_is_a {
                b.iter().map(|y| g.mul(x, y)).collect()
            } else {
                a.iter().map(|y| g.mul(y, x)).collect()
            }
        };
        let outer = if outer_is_a { &a } else { &b };
        let mut seen: FxHashSet<Element> = FxHashSet::with_capacity_and_hasher(hint.min(1 << 20), FxBuildHasher);
        if work as usize >= PAR_THRESHOLD && rayon::current_num_threads() > 1 {
            let chunk = (outer.len() / rayon::current_num_threads()).max(1);
            let parts: Vec<FxHashSet<Element>> = outer
                .par_chunks(chunk)
                .map(|xs| xs.iter().flat_map(|x| row(x)).collect())
                .collect();
            for p in parts {
                seen.extend(p);
                if seen.len() > caps.max_elements {
                    return Err(Error::cap("product set size", caps.max_elements));
                }
            }
        } else {
            for x in outer {
                seen.extend(row(x));
                if seen.len() > caps.max_elements {
                    return Err(Error::cap("product set size", caps.max_elements));
                }
            }
        }
        Ok(Self::from_trusted(g, seen.into_iter().collect()))
    }

    /// `Aⁿ` for `n ≥ 1`.
    pub fn power(&self, n: usize) -> Result<ElementSet> {
        Powers::new(self.clone()).get(n)
    }
}

/// Memoized powers `A, A², A³, …` of a fixed set.
pub struct Powers {
    cache: Vec<ElementSet>,
}

impl Powers {
    pub fn new(base: ElementSet) -> Self {
        Powers { cache: vec![base] }
    }

    pub fn base(&self) -> &ElementSet {
        &self.cache[0]
    }

    /// `Aⁿ`, `n ≥ 1`.
    pub fn get(&mut self, n: usize) -> Result<ElementSet> {
        if n == 0 {
            return Err(Error::InvalidInput("power exponent must be at least 1".into()));
        }
        while self.cache.len() < n {
            if self.is_stable() {
                return Ok(self.cache.last().unwrap().clone());
            }
            let next = self.cache.last().unwrap().product(&self.cache[0])?;
            self.cache.push(next);
        }
        Ok(self.cache[n - 1].clone())
    }

    /// With `1 ∈ A` the powers increase, so two equal consecutive sizes mean
    /// every later power is the same set.
    pub fn is_stable(&self) -> bool {
        let k = self.cache.len();
        k >= 2 && self.cache[0].contains_identity() && self.cache[k - 1].len() == self.cache[k - 2].len()
    }

    /// Number of powers computed so far.
    pub fn computed(&self) -> usize {
        self.cache.len()
    }
}

/// `⟨S⟩` by breadth-first closure from the identity under `S ∪ S⁻¹`.
pub fn subgroup_closure(group: &Group, s: &ElementSet) -> Result<ElementSet> {
    subgroup_closure_capped(group, s, group.caps().max_elements)
}

/// `⟨S⟩` with an explicit element cap.
pub fn subgroup_closure_capped(group: &Group, s: &ElementSet, cap: usize) -> Result<ElementSet> {
    if s.group() != group {
        return Err(Error::GroupMismatch);
    }
    let gens = s.symmetrize().to_vec();
    let id = group.identity().clone();
    let mut seen: FxHashSet<Element> = FxHashSet::from_iter([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for t in &gens {
            let y = group.mul(&x, t);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(Error::cap("subgroup closure", cap));
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(ElementSet::from_trusted(group, seen.into_iter().collect()))
}

/// Whether `h` is closed under multiplication and inversion and contains 1.
pub fn is_subgroup(h: &ElementSet) -> bool {
    let g = h.group();
    h.contains_identity() && h.is_symmetric() && h.iter().all(|a| h.iter().all(|b| h.contains(&g.mul(a, b))))
}
