//! Translate covers: greedy Ruzsa covering, greedy and exact minimal covers
//! of `AA` by left translates of `A`.

use crate::error::{Error, Result};
use crate::group::Element;
use crate::set::ElementSet;
use serde::Serialize;
use std::collections::HashSet;

/// `covered ⊆ X·translates` with side recorded.
#[derive(Clone, Debug, Serialize)]
pub struct CoverWitness {
    pub covered: String,
    pub translates: String,
    pub x: ElementSet,
    pub side: &'static str,
}

impl CoverWitness {
    pub fn new(covered: impl Into<String>, translates: impl Into<String>, x: ElementSet) -> Self {
        CoverWitness {
            covered: covered.into(),
            translates: translates.into(),
            x,
            side: "left",
        }
    }
}

/// Extensional check `covered ⊆ X·T`: for each `c` some `x` has `x⁻¹c ∈ T`.
pub fn covers(covered: &ElementSet, x: &ElementSet, t: &ElementSet) -> bool {
    let g = covered.group();
    let xinv: Vec<Element> = x.iter().map(|e| g.inv(e)).collect();
    covered.iter().all(|c| xinv.iter().any(|xi| t.contains(&g.mul(xi, c))))
}

/// Ruzsa covering: scan `A` in canonical order and keep `a` whenever `aB`
/// misses every translate kept so far. The kept set `X` is maximal, so
/// `A ⊆ X·B·B⁻¹`, and disjointness gives `|X||B| ≤ |AB|`.
pub fn ruzsa_cover(a: &ElementSet, b: &ElementSet) -> Result<CoverWitness> {
    a.same_group(b)?;
    if b.is_empty() {
        return Err(Error::InvalidInput("ruzsa_cover needs a nonempty B".into()));
    }
    let g = a.group();
    let work = a.len() as u128 * b.len() as u128;
    if work > g.caps().max_work as u128 {
        return Err(Error::cap("ruzsa cover translates", g.caps().max_work));
    }
    let mut used: HashSet<Element> = HashSet::new();
    let mut x = Vec::new();
    for s in a.iter() {
        let tr: Vec<Element> = b.iter().map(|e| g.mul(s, e)).collect();
        if tr.iter().all(|e| !used.contains(e)) {
            used.extend(tr);
            x.push(s.clone());
        }
    }
    let x = ElementSet::from_trusted(g, x);
    let ab = a.product(b)?;
    if x.len() * b.len() > ab.len() {
        return Err(Error::violation(
            "ruzsa cover size |X| <= |AB|/|B|",
            serde_json::json!({"x": x.len(), "ab": ab.len(), "b": b.len()}),
        ));
    }
    let bbinv = b.product(&b.inverse())?;
    if !covers(a, &x, &bbinv) {
        return Err(Error::violation(
            "ruzsa cover containment A ⊆ X·B·B⁻¹",
            serde_json::json!({"x": x.to_json()}),
        ));
    }
    Ok(CoverWitness::new("A", "BB^-1", x))
}

/// Index-space view of a cover instance: points of `AA` and a translate
/// evaluator.
struct Instance<'a> {
    a: &'a ElementSet,
    points: ElementSet,
}

impl Instance<'_> {
    /// Indices of points of `tA` that lie in `AA`.
    fn hits(&self, t: &Element) -> Vec<usize> {
        let g = self.a.group();
        self.a
            .iter()
            .filter_map(|e| self.points.index_of(&g.mul(t, e)))
            .collect()
    }
}

/// Largest `|A|²` for which greedy covering precomputes `a_i⁻¹a_j` indices.
/// Keeps `|A| < 2¹⁶`, so candidate indices fit in `u16`.
const QUOTIENT_TABLE_LIMIT: usize = 1 << 28;
const NONE: u32 = u32::MAX;

/// Column form of the quotient table `T[i][j]` = index in `AA` of `a_i⁻¹a_j`:
/// `rows[start[d]..start[d + 1]]` lists the `i` with `d` in row `i`, in
/// increasing order. Each pair `(i, d)` occurs once since `j ↦ a_i⁻¹a_j` is
/// injective. Absent when some quotient leaves `AA` (never for symmetric `A`).
struct Quotients {
    start: Vec<u32>,
    rows: Vec<u16>,
}

fn quotient_table(a: &ElementSet, aa: &ElementSet, inv: &[Element]) -> Option<Quotients> {
    let n = a.len();
    if n * n > QUOTIENT_TABLE_LIMIT || aa.len() >= NONE as usize {
        return None;
    }
    let g = a.group();
    let mut t = Vec::with_capacity(n * n);
    for ai in inv {
        for aj in a.iter() {
            t.push(aa.index_of(&g.mul(ai, aj))? as u32);
        }
    }
    let mut start = vec![0u32; aa.len() + 1];
    for &d in &t {
        start[d as usize + 1] += 1;
    }
    for d in 0..aa.len() {
        start[d + 1] += start[d];
    }
    let mut fill = start.clone();
    let mut rows = vec![0u16; t.len()];
    for (x, &d) in t.iter().enumerate() {
        rows[fill[d as usize] as usize] = (x / n) as u16;
        fill[d as usize] += 1;
    }
    Some(Quotients { start, rows })
}

/// Greedy cover of `AA` by left translates of `A`: repeatedly take the
/// least uncovered `u` and add `u·a⁻¹` for the canonical-least `a ∈ A`
/// maximizing the number of newly covered points.
pub fn greedy_translate_cover(a: &ElementSet, aa: &ElementSet) -> Result<ElementSet> {
    let g = a.group();
    let inst = Instance { a, points: aa.clone() };
    let inv: Vec<Element> = a.iter().map(|e| g.inv(e)).collect();
    let table = quotient_table(a, aa, &inv);
    let k = a.len();
    let n = aa.len();
    let mut uncovered = vec![true; n];
    let mut left = n;
    let mut next = 0usize;
    let mut chosen = Vec::new();
    let mut score = vec![0u32; k];
    while left > 0 {
        while !uncovered[next] {
            next += 1;
        }
        let u = aa.get(next).unwrap();
        let best = match &table {
            // score(i) = #{d in row i : u·d uncovered}, summed column-wise
            Some(q) => {
                score.iter_mut().for_each(|c| *c = 0);
                for (d, x) in aa.iter().enumerate() {
                    let live = aa.index_of(&g.mul(u, x)).is_some_and(|p| uncovered[p]);
                    if live {
                        for &i in &q.rows[q.start[d] as usize..q.start[d + 1] as usize] {
                            score[i as usize] += 1;
                        }
                    }
                }
                // max coverage, ties to the least index in canonical order of A
                let mut best = 0;
                for i in 1..k {
                    if score[i] > score[best] {
                        best = i;
                    }
                }
                best
            }
            None => {
                let cap = left.min(k);
                let mut best: Option<(usize, usize)> = None;
                for (i, ai) in inv.iter().enumerate() {
                    let c = inst.hits(&g.mul(u, ai)).into_iter().filter(|&p| uncovered[p]).count();
                    if best.is_none_or(|b| c > b.0) {
                        best = Some((c, i));
                        if c == cap {
                            break;
                        }
                    }
                }
                best.unwrap().1
            }
        };
        let t = g.mul(u, &inv[best]);
        for p in inst.hits(&t) {
            if uncovered[p] {
                uncovered[p] = false;
                left -= 1;
            }
        }
        chosen.push(t);
    }
    Ok(ElementSet::from_trusted(g, chosen))
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn and_not_count(&self, other: &Bits) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & !b).count_ones() as usize)
            .sum()
    }
    fn or_assign(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }
    fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
    fn first_zero(&self, n: usize) -> Option<usize> {
        (0..n).find(|&i| !self.get(i))
    }
}

/// Minimum number of left translates of `A` covering `AA`, by branch and
/// bound seeded with `upper`. Candidate translates `u·a⁻¹` are reduced to
/// distinct, undominated coverage patterns before the cap is applied.
pub fn exact_translate_cover(a: &ElementSet, aa: &ElementSet, upper: usize) -> Result<(usize, ElementSet)> {
    let g = a.group();
    let caps = g.caps();
    if aa.len() > caps.exact_cover_points {
        return Err(Error::cap("exact cover point count |AA|", caps.exact_cover_points));
    }
    let inst = Instance { a, points: aa.clone() };
    let n = aa.len();
    let inv: Vec<Element> = a.iter().map(|e| g.inv(e)).collect();
    let mut cands: Vec<Element> = aa
        .iter()
        .flat_map(|u| inv.iter().map(move |ai| g.mul(u, ai)))
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    cands.sort_unstable();
    let mut pats: Vec<(Element, Bits)> = Vec::new();
    let mut seen_pat: HashSet<Vec<u64>> = HashSet::new();
    for t in cands {
        let mut b = Bits::new(n);
        for i in inst.hits(&t) {
            b.set(i);
        }
        if seen_pat.insert(b.0.clone()) {
            pats.push((t, b));
        }
    }
    if pats.len() > 16 * caps.exact_cover_candidates {
        return Err(Error::cap(
            format!("exact cover candidate translates ({})", pats.len()),
            caps.exact_cover_candidates,
        ));
    }
    let undominated: Vec<(Element, Bits)> = pats
        .iter()
        .enumerate()
        .filter(|(i, (_, b))| {
            !pats
                .iter()
                .enumerate()
                .any(|(j, (_, c))| j != *i && b.is_subset(c) && b.count() < c.count())
        })
        .map(|(_, p)| p.clone())
        .collect();
    if undominated.len() > caps.exact_cover_candidates {
        return Err(Error::cap(
            format!("exact cover candidate translates ({})", undominated.len()),
            caps.exact_cover_candidates,
        ));
    }
    let mut search = Search {
        pats: &undominated,
        n,
        per: a.len(),
        best: upper + 1,
        best_set: Vec::new(),
        stack: Vec::new(),
    };
    search.go(Bits::new(n));
    if search.best_set.is_empty() {
        return Err(Error::violation(
            "exact cover improves on or matches the greedy seed",
            serde_json::json!({"upper": upper}),
        ));
    }
    let x = ElementSet::from_trusted(g, search.best_set.iter().map(|&i| undominated[i].0.clone()).collect());
    Ok((search.best, x))
}

struct Search<'a> {
    pats: &'a [(Element, Bits)],
    n: usize,
    per: usize,
    best: usize,
    best_set: Vec<usize>,
    stack: Vec<usize>,
}

impl Search<'_> {
    fn go(&mut self, covered: Bits) {
        let Some(u) = covered.first_zero(self.n) else {
            if self.stack.len() < self.best {
                self.best = self.stack.len();
                self.best_set = self.stack.clone();
            }
            return;
        };
        let rest = self.n - covered.count();
        if self.stack.len() + rest.div_ceil(self.per) >= self.best {
            return;
        }
        let mut options: Vec<(usize, usize)> = self
            .pats
            .iter()
            .enumerate()
            .filter(|(_, (_, b))| b.get(u))
            .map(|(i, (_, b))| (b.and_not_count(&covered), i))
            .collect();
        options.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
        for (_, i) in options {
            let mut next = covered.clone();
            next.or_assign(&self.pats[i].1);
            self.stack.push(i);
            self.go(next);
            self.stack.pop();
        }
    }
}
