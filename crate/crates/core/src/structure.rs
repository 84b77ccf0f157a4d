//! Detectors for sets of small doubling, subgroup searches, the Schreier
//! index bound, dense generation and the strong approximate-group axioms.

use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::rational::Rat;
use crate::set::{is_subgroup, subgroup_closure, subgroup_closure_capped, ElementSet, Powers};
use crate::setcalc::{escape_norm, EscapeNorm};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::json;
use std::collections::{HashMap, HashSet, VecDeque};

/// A subgroup `H` and an element `a` with the coset facts that were checked.
#[derive(Clone, Debug, Serialize)]
pub struct CosetStructure {
    pub h: ElementSet,
    pub a: serde_json::Value,
    pub h_size: usize,
    /// `A = aH`.
    pub left_coset: bool,
    /// `A = Ha`.
    pub right_coset: bool,
    /// `A ⊆ aH` for every `a ∈ A`.
    pub contained: bool,
    /// `aHa⁻¹ = H` for every `a ∈ A`.
    pub normalized: bool,
}

fn fail(property: &str, a: &ElementSet) -> Error {
    Error::violation(property, json!({"a": a.to_json()}))
}

/// `|AA| = |A|` exactly when `A` is a coset `aH = Ha` of a finite subgroup
/// normalized by `a`; `H = A·a⁻¹` for the canonical-least `a`.
pub fn detect_unit_doubling(a: &ElementSet) -> Result<Option<CosetStructure>> {
    let Some(a0) = a.first().cloned() else {
        return Err(Error::InvalidInput("A must be nonempty".into()));
    };
    let aa = a.product(a)?;
    if aa.len() != a.len() {
        return Ok(None);
    }
    let g = a.group();
    let h = a.right_translate(&g.inv(&a0));
    if !is_subgroup(&h) {
        return Err(fail("unit doubling: Aa^-1 is a subgroup", a));
    }
    let left = h.left_translate(&a0) == *a;
    let right = h.right_translate(&a0) == *a;
    let normal = h.conjugate(&a0) == h;
    if !(left && right && normal) {
        return Err(fail("unit doubling: A = aH = Ha and aHa^-1 = H", a));
    }
    Ok(Some(CosetStructure {
        h_size: h.len(),
        h,
        a: g.to_json(&a0),
        left_coset: left,
        right_coset: right,
        contained: true,
        normalized: normal,
    }))
}

/// For `|AA| < t|A|` with `1 < t ≤ 3/2`: `H = AA⁻¹ = A⁻¹A` is a subgroup with
/// `|H| < 3/2|A|` normalized by `A` and `A ⊆ aH`; if moreover
/// `|AA| ≤ 1.1|A|` then `|H| ≤ 1.2|A|`.
pub fn detect_small_doubling(a: &ElementSet, threshold: &Rat) -> Result<Option<CosetStructure>> {
    if *threshold <= Rat::one() || *threshold > Rat::new(3, 2) {
        return Err(Error::InvalidInput(format!("threshold {threshold} is not in (1, 3/2]")));
    }
    let Some(a0) = a.first().cloned() else {
        return Err(Error::InvalidInput("A must be nonempty".into()));
    };
    let aa = a.product(a)?;
    if Rat::int(aa.len()) >= threshold.clone() * Rat::int(a.len()) {
        return Ok(None);
    }
    let g = a.group();
    let ainv = a.inverse();
    let h = a.product(&ainv)?;
    if h != ainv.product(a)? {
        return Err(fail("Freiman 3/2: AA^-1 = A^-1A", a));
    }
    if !is_subgroup(&h) {
        return Err(fail("Freiman 3/2: AA^-1 is a subgroup", a));
    }
    if 2 * h.len() >= 3 * a.len() {
        return Err(fail("Freiman 3/2: |H| < 3/2|A|", a));
    }
    let contained = a.iter().all(|x| {
        let xi = g.inv(x);
        a.iter().all(|y| h.contains(&g.mul(&xi, y)))
    });
    let normalized = a.iter().all(|x| h.conjugate(x) == h);
    if !(contained && normalized) {
        return Err(fail("Freiman 3/2: A ⊆ aH and A normalizes H", a));
    }
    if 10 * aa.len() <= 11 * a.len() && 5 * h.len() > 6 * a.len() {
        return Err(fail("small doubling 1.1: |H| <= 1.2|A|", a));
    }
    Ok(Some(CosetStructure {
        h_size: h.len(),
        left_coset: h.left_translate(&a0) == *a,
        right_coset: h.right_translate(&a0) == *a,
        a: g.to_json(&a0),
        h,
        contained,
        normalized,
    }))
}

/// Multiplication table of a finite group given by its sorted element list.
pub(crate) struct Table {
    pub elems: ElementSet,
    pub mul: Vec<u16>,
    pub identity: u16,
}

impl Table {
    pub fn new(elems: &ElementSet) -> Result<Table> {
        let n = elems.len();
        if n > u16::MAX as usize {
            return Err(Error::cap("multiplication table order", u16::MAX));
        }
        let g = elems.group();
        let idx = |e: &Element| -> Result<u16> {
            elems
                .index_of(e)
                .map(|i| i as u16)
                .ok_or_else(|| Error::Precondition("set is not closed under multiplication".into()))
        };
        let mut mul = Vec::with_capacity(n * n);
        for x in elems.iter() {
            for y in elems.iter() {
                mul.push(idx(&g.mul(x, y))?);
            }
        }
        Ok(Table {
            identity: idx(g.identity())?,
            elems: elems.clone(),
            mul,
        })
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn m(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.len() + b as usize]
    }

    /// Closure of `base ∪ {extra}` given generators of `base`.
    fn extend(&self, base: &[u16], gens: &[u16], extra: u16) -> Vec<u16> {
        let mut inside = vec![false; self.len()];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for &x in base {
            inside[x as usize] = true;
            out.push(x);
            queue.push_back(x);
        }
        let mut all_gens = gens.to_vec();
        all_gens.push(extra);
        while let Some(x) = queue.pop_front() {
            for &s in &all_gens {
                let y = self.m(x, s);
                if !inside[y as usize] {
                    inside[y as usize] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Every subgroup of order at most `max_order`, by cyclic extension.
    /// Ordered by size, then by sorted element index list.
    pub fn subgroups_up_to(&self, max_order: usize) -> Vec<Vec<u16>> {
        let trivial = vec![self.identity];
        let mut found: HashMap<Vec<u16>, Vec<u16>> = HashMap::from([(trivial.clone(), Vec::new())]);
        let mut frontier = vec![trivial];
        while let Some(h) = frontier.pop() {
            let gens = found[&h].clone();
            let mut in_h = vec![false; self.len()];
            for &x in &h {
                in_h[x as usize] = true;
            }
            // ⟨H, g⟩ depends only on the coset gH
            let mut seen_coset = vec![false; self.len()];
            for g in 0..self.len() as u16 {
                if in_h[g as usize] || seen_coset[g as usize] {
                    continue;
                }
                for &x in &h {
                    seen_coset[self.m(g, x) as usize] = true;
                }
                let k = self.extend(&h, &gens, g);
                if k.len() > max_order || found.contains_key(&k) {
                    continue;
                }
                let mut kg = gens.clone();
                kg.push(g);
                found.insert(k.clone(), kg);
                frontier.push(k);
            }
        }
        let mut all: Vec<Vec<u16>> = found.into_keys().collect();
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        all
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HamidouneCover {
    pub h: ElementSet,
    pub cosets: usize,
    /// `⌊1/(2−K)⌋` with `K = |AA|/|A|`.
    pub bound: usize,
    pub doubling: Rat,
    pub subgroups_searched: usize,
}

/// For `|AA| < 2|A|`: the first subgroup `H ≤ ⟨A⟩` with `|H| ≤ |A|` whose left
/// cosets meeting `A` number at most `⌊1/(2−K)⌋`. `None` happens, e.g. for
/// `G` minus a point, and callers report it as a violation.
pub fn hamidoune_cover(a: &ElementSet) -> Result<Option<HamidouneCover>> {
    if a.is_empty() {
        return Err(Error::InvalidInput("A must be nonempty".into()));
    }
    let aa = a.product(a)?;
    if aa.len() >= 2 * a.len() {
        return Err(Error::Precondition(format!(
            "doubling |AA|/|A| = {}/{} is not below 2",
            aa.len(),
            a.len()
        )));
    }
    let g = a.group();
    let scope = g.caps().subgroup_enum_order;
    let span = match subgroup_closure_capped(g, a, scope) {
        Err(Error::CapExceeded { .. }) => {
            return Err(Error::cap("subgroup enumeration scope |<A>|", scope));
        }
        other => other?,
    };
    let table = Table::new(&span)?;
    let bound = a.len() / (2 * a.len() - aa.len());
    let a_idx: Vec<u16> = a.iter().map(|x| span.index_of(x).unwrap() as u16).collect();
    let subgroups = table.subgroups_up_to(a.len());
    for h in &subgroups {
        // left coset aH is identified by its least index
        let cosets: HashSet<u16> = a_idx
            .iter()
            .map(|&x| h.iter().map(|&y| table.m(x, y)).min().unwrap())
            .collect();
        if cosets.len() <= bound {
            let hset = ElementSet::from_trusted(g, h.iter().map(|&i| span.get(i as usize).unwrap().clone()).collect());
            return Ok(Some(HamidouneCover {
                h: hset,
                cosets: cosets.len(),
                bound,
                doubling: Rat::new(aa.len(), a.len()),
                subgroups_searched: subgroups.len(),
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize)]
pub struct SchreierReport {
    pub k: usize,
    pub c: Rat,
    pub generated_order: usize,
    /// `[⟨S⟩ : H]` from the Schreier coset graph.
    pub index: usize,
    /// `|S^k ∩ H|` with `S` replaced by `S ∪ S⁻¹ ∪ {1}`.
    pub power_meets_h: usize,
    pub double_power_size: usize,
    pub hypothesis: bool,
    pub conclusion: bool,
}

/// Index of `H` in `⟨S⟩` by breadth-first search over right cosets `Hg`,
/// each named by its canonical-least element.
pub fn coset_index(h: &ElementSet, gens: &[Element]) -> usize {
    let g = h.group();
    let key = |x: &Element| h.iter().map(|y| g.mul(y, x)).min().unwrap();
    let start = key(g.identity());
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for s in gens {
            let y = key(&g.mul(&x, s));
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.len()
}

/// Schreier index bound: if `|S^k ∩ H| > |S^{2k}|/C` and `k ≥ C > 0` then
/// `[⟨S⟩ : H] ≤ C`.
pub fn schreier_index(group: &Group, s: &ElementSet, h: &ElementSet, k: usize, c: &Rat) -> Result<SchreierReport> {
    if s.group() != group || h.group() != group {
        return Err(Error::GroupMismatch);
    }
    if !c.is_positive() || k == 0 {
        return Err(Error::InvalidInput("need k >= 1 and C > 0".into()));
    }
    if !is_subgroup(h) {
        return Err(Error::Precondition("H is not a subgroup".into()));
    }
    let span = subgroup_closure(group, s)?;
    if !h.is_subset(&span) {
        return Err(Error::Precondition("H is not contained in <S>".into()));
    }
    let t = s.symmetrize();
    let mut pw = Powers::new(t.clone());
    let sk = pw.get(k)?;
    let s2k = pw.get(2 * k)?;
    let meets = sk.intersection(h)?.len();
    let index = coset_index(h, &t.to_vec());
    let (num, den) = (c.numer().clone(), c.denom().clone());
    let hypothesis = BigInt::from(meets) * &num > BigInt::from(s2k.len()) * &den && BigInt::from(k) * &den >= num;
    let conclusion = BigInt::from(index) * &den <= num;
    if hypothesis && !conclusion {
        return Err(Error::violation(
            "Schreier index bound [<S>:H] <= C",
            json!({"s": s.to_json(), "h": h.to_json(), "k": k, "c": c, "index": index}),
        ));
    }
    Ok(SchreierReport {
        k,
        c: c.clone(),
        generated_order: span.len(),
        index,
        power_meets_h: meets,
        double_power_size: s2k.len(),
        hypothesis,
        conclusion,
    })
}

/// `|A ∩ B| ≥ max(|A|, |B|)/K`, exactly.
pub fn commensurable(a: &ElementSet, b: &ElementSet, k: &Rat) -> Result<bool> {
    a.same_group(b)?;
    if !k.is_positive() {
        return Err(Error::InvalidInput("K must be positive".into()));
    }
    let inter = a.intersection(b)?.len();
    Ok(Rat::int(inter) * k.clone() >= Rat::int(a.len().max(b.len())))
}

#[derive(Clone, Debug, Serialize)]
pub struct DenseGenerationReport {
    pub order: usize,
    pub size: usize,
    pub alpha: Rat,
    /// Least `n` with `Sⁿ = G`.
    pub n: usize,
    /// `⌈log(1/(1.2α))/log 1.1⌉`.
    pub k0: i64,
    /// `2^(k₀+1)`, or 2 when `k₀ ≤ 0`.
    pub bound: u64,
    pub holds: bool,
}

pub fn dense_generation_bound(alpha: &Rat) -> (i64, u64) {
    let k0 = ((1.0 / (1.2 * alpha.to_f64())).ln() / 1.1f64.ln()).ceil() as i64;
    let bound = if k0 <= 0 { 2 } else { 1u64 << (k0 + 1).min(63) };
    (k0, bound)
}

/// Least `n` with `Sⁿ = G` for a dense symmetric generating `S`, checked
/// against `n ≤ 2^(k₀+1)`.
pub fn dense_generation(group: &Group, s: &ElementSet, alpha: &Rat) -> Result<DenseGenerationReport> {
    if s.group() != group {
        return Err(Error::GroupMismatch);
    }
    let order = group
        .order()
        .ok_or_else(|| Error::Precondition("dense generation needs a finite group".into()))? as usize;
    if !alpha.is_positive() || *alpha > Rat::one() {
        return Err(Error::InvalidInput("alpha must lie in (0, 1]".into()));
    }
    if !s.is_symmetric() {
        return Err(Error::Precondition("S is not symmetric".into()));
    }
    if Rat::int(s.len()) < alpha.clone() * Rat::int(order) {
        return Err(Error::Precondition(format!("|S| = {} is below alpha|G|", s.len())));
    }
    if subgroup_closure(group, s)?.len() != order {
        return Err(Error::Precondition("S does not generate G".into()));
    }
    let mut pw = Powers::new(s.clone());
    let mut sizes = Vec::new();
    let mut n = 1;
    loop {
        let p = pw.get(n)?;
        if p.len() == order {
            break;
        }
        if n >= 3 && p == pw.get(n - 2)? {
            return Err(Error::Precondition("S^n never equals G (powers cycle)".into()));
        }
        sizes.push(p.len());
        n += 1;
    }
    let (k0, bound) = dense_generation_bound(alpha);
    let holds = n as u64 <= bound;
    if !holds {
        return Err(Error::violation(
            "dense generation n <= 2^(k0+1)",
            json!({"s": s.to_json(), "n": n, "bound": bound}),
        ));
    }
    Ok(DenseGenerationReport {
        order,
        size: s.len(),
        alpha: alpha.clone(),
        n,
        k0,
        bound,
        holds,
    })
}

/// Result of evaluating one axiom.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum AxiomOutcome {
    Holds,
    Fails { witness: serde_json::Value },
    CapExceeded { reason: String },
}

impl AxiomOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, AxiomOutcome::Holds)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Consequences {
    pub checked: usize,
    /// Elements with `n_A(g) ≤ n_{A^100}(g)`.
    pub lower_holds: usize,
    /// Elements with `n_{A^100}(g) ≤ 1000·n_A(g)`.
    pub upper_holds: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrongApproxReport {
    /// `⌈10⁶K³⌉`.
    pub exponent: String,
    /// If `1, g, …, g^1000 ∈ A^100` then `g ∈ A`.
    pub escape_axiom: AxiomOutcome,
    /// `(S^{A⁴})^N ⊆ A`.
    pub conjugation_axiom: AxiomOutcome,
    pub consequences: Option<Consequences>,
    pub strong: bool,
}

/// Upper limit on distinct powers examined for the conjugation axiom.
const MAX_POWER_STEPS: usize = 10_000;

fn escape_n(e: &EscapeNorm) -> Option<u64> {
    match e {
        EscapeNorm::Zero => None,
        EscapeNorm::Finite { n, .. } => Some(*n),
        EscapeNorm::Infinite => Some(0),
    }
}

/// Evaluate both strong approximate-group axioms with early exit.
pub fn strong_approx_check(a: &ElementSet, s: &ElementSet, k: &Rat) -> Result<StrongApproxReport> {
    a.same_group(s)?;
    if !a.contains_identity() || !a.is_symmetric() {
        return Err(Error::Precondition(
            "A must be symmetric and contain the identity".into(),
        ));
    }
    if !k.is_positive() {
        return Err(Error::InvalidInput("K must be positive".into()));
    }
    let g = a.group();
    let k3 = k.pow(3) * Rat::int(1_000_000);
    let n_big = k3.ceil();
    let mut pw = Powers::new(a.clone());

    let (a100, escape_axiom) = match pw.get(100) {
        Err(Error::CapExceeded { what, .. }) => (None, AxiomOutcome::CapExceeded { reason: what }),
        Err(e) => return Err(e),
        Ok(a100) => {
            let mut out = AxiomOutcome::Holds;
            'g: for x in a100.iter() {
                if a.contains(x) {
                    continue;
                }
                let mut p = x.clone();
                for _ in 1..1000 {
                    p = g.mul(&p, x);
                    if !a100.contains(&p) {
                        continue 'g;
                    }
                }
                out = AxiomOutcome::Fails {
                    witness: json!({"g": g.to_json(x)}),
                };
                break;
            }
            (Some(a100), out)
        }
    };

    let conjugation_axiom = match pw.get(4) {
        Err(Error::CapExceeded { what, .. }) => AxiomOutcome::CapExceeded { reason: what },
        Err(e) => return Err(e),
        Ok(a4) => conjugation_axiom(a, s, &a4, &n_big)?,
    };

    let consequences = match &a100 {
        Some(a100) => {
            let mut c = Consequences {
                checked: 0,
                lower_holds: 0,
                upper_holds: 0,
            };
            for x in a.iter() {
                let na = escape_n(&escape_norm(a, x)?);
                let nb = escape_n(&escape_norm(a100, x)?);
                c.checked += 1;
                // None stands for an unbounded chain
                let le = |u: Option<u64>, v: Option<u64>| match (u, v) {
                    (_, None) => true,
                    (None, Some(_)) => false,
                    (Some(u), Some(v)) => u <= v,
                };
                if le(na, nb) {
                    c.lower_holds += 1;
                }
                if le(nb, na.map(|v| v.saturating_mul(1000))) {
                    c.upper_holds += 1;
                }
            }
            Some(c)
        }
        None => None,
    };
    let strong = escape_axiom.holds() && conjugation_axiom.holds();
    Ok(StrongApproxReport {
        exponent: n_big.to_string(),
        escape_axiom,
        conjugation_axiom,
        consequences,
        strong,
    })
}

/// `T = {b s b⁻¹ : b ∈ A⁴, s ∈ S}`; walks `T, T², …` until a power leaves
/// `A` (fails), a power repeats (all powers stay in `A`), or `N` is reached.
fn conjugation_axiom(a: &ElementSet, s: &ElementSet, a4: &ElementSet, n_big: &BigInt) -> Result<AxiomOutcome> {
    let g = a.group();
    let conj: Vec<Element> = a4
        .iter()
        .flat_map(|b| {
            let bi = g.inv(b);
            s.iter().map(move |x| g.mul(&g.mul(b, x), &bi)).collect::<Vec<_>>()
        })
        .collect();
    let t = ElementSet::from_trusted(g, conj);
    if t.is_empty() || n_big.is_zero() {
        return Ok(AxiomOutcome::Holds);
    }
    let limit = n_big.to_usize().unwrap_or(usize::MAX);
    let mut seen: HashSet<Vec<Element>> = HashSet::new();
    let mut cur = t.clone();
    for m in 1..=limit {
        if let Some(x) = cur.iter().find(|x| !a.contains(x)) {
            return Ok(AxiomOutcome::Fails {
                witness: json!({"power": m, "element": g.to_json(x)}),
            });
        }
        if !seen.insert(cur.to_vec()) {
            return Ok(AxiomOutcome::Holds);
        }
        if m >= MAX_POWER_STEPS {
            return Ok(AxiomOutcome::CapExceeded {
                reason: format!("more than {MAX_POWER_STEPS} distinct powers of S^(A^4)"),
            });
        }
        if m < limit {
            cur = cur.product(&t)?;
        }
    }
    Ok(AxiomOutcome::Holds)
}
