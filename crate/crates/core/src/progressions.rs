//! Progressions `P(x₁,…,x_r; L₁,…,L_r)`, nilprogressions, growth profiles
//! and multi-scale doubling experiments.

use crate::error::{Error, Result};
use crate::group::{Element, Group, GroupSpec};
use crate::rational::Rat;
use crate::set::{is_subgroup, subgroup_closure, ElementSet, Powers};
use crate::setcalc::{approx_constant, approx_constant_with_square};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;
use std::collections::{HashMap, HashSet, VecDeque};

/// Generators, letter budgets and an optional finite kernel.
#[derive(Clone, Debug)]
pub struct ProgressionSpec {
    pub group: Group,
    pub generators: Vec<Element>,
    pub lengths: Vec<u32>,
    pub kernel: Option<ElementSet>,
}

impl ProgressionSpec {
    pub fn new(group: &Group, generators: Vec<Element>, lengths: Vec<u32>) -> Result<Self> {
        Self::with_kernel(group, generators, lengths, None)
    }

    /// A kernel must be a finite subgroup normalized by every generator.
    pub fn with_kernel(
        group: &Group,
        generators: Vec<Element>,
        lengths: Vec<u32>,
        kernel: Option<ElementSet>,
    ) -> Result<Self> {
        let r = generators.len();
        if r == 0 {
            return Err(Error::InvalidInput("a progression needs at least one generator".into()));
        }
        if r > group.caps().progression_rank {
            return Err(Error::cap(
                format!("progression rank {r}"),
                group.caps().progression_rank,
            ));
        }
        if lengths.len() != r {
            return Err(Error::InvalidInput(format!(
                "{r} generators but {} lengths",
                lengths.len()
            )));
        }
        for x in &generators {
            group.check(x)?;
        }
        if let Some(k) = &kernel {
            if k.group() != group {
                return Err(Error::GroupMismatch);
            }
            if !is_subgroup(k) {
                return Err(Error::Precondition("kernel is not a subgroup".into()));
            }
            if generators.iter().any(|x| k.conjugate(x) != *k) {
                return Err(Error::Precondition("kernel is not normalized by the generators".into()));
            }
        }
        Ok(ProgressionSpec {
            group: group.clone(),
            generators,
            lengths,
            kernel,
        })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Same generators with every length multiplied by `n`.
    pub fn scaled(&self, n: u32) -> ProgressionSpec {
        ProgressionSpec {
            lengths: self.lengths.iter().map(|l| l * n).collect(),
            ..self.clone()
        }
    }

    /// Parse `{"generators": [...], "lengths": [...], "kernel": [...]}`.
    pub fn from_json(group: &Group, v: &serde_json::Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::InvalidInput("progression spec must be a JSON object".into()))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "generators" | "lengths" | "kernel") {
                return Err(Error::InvalidInput(format!("unknown progression field `{key}`")));
            }
        }
        let gens = obj
            .get("generators")
            .and_then(|g| g.as_array())
            .ok_or_else(|| Error::InvalidInput("missing `generators` array".into()))?
            .iter()
            .map(|x| group.parse_canonical(x))
            .collect::<Result<Vec<_>>>()?;
        let lengths = obj
            .get("lengths")
            .and_then(|l| l.as_array())
            .ok_or_else(|| Error::InvalidInput("missing `lengths` array".into()))?
            .iter()
            .map(|x| {
                x.as_u64()
                    .and_then(|v| u32::try_from(v).ok())
                    .ok_or_else(|| Error::InvalidInput(format!("length {x} is not a nonnegative integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        let kernel = obj.get("kernel").map(|k| ElementSet::from_json(group, k)).transpose()?;
        Self::with_kernel(group, gens, lengths, kernel)
    }
}

/// `u ≤ v` componentwise.
fn dominated(u: &[u32], v: &[u32]) -> bool {
    u.iter().zip(v).all(|(a, b)| a <= b)
}

/// All values of words using at most `L_i` letters `x_i^{±1}`, by
/// breadth-first search over `(element, letters used)` states that keeps
/// only Pareto-minimal usage vectors per element; then `kernel·P`.
pub fn enumerate_progression(spec: &ProgressionSpec) -> Result<ElementSet> {
    let g = &spec.group;
    let cap = g.caps().max_elements;
    let r = spec.rank();
    let letters: Vec<(usize, Element)> = spec
        .generators
        .iter()
        .enumerate()
        .flat_map(|(i, x)| [(i, x.clone()), (i, g.inv(x))])
        .collect();
    let id = g.identity().clone();
    let mut frontier: HashMap<Element, Vec<Vec<u32>>> = HashMap::from([(id.clone(), vec![vec![0; r]])]);
    let mut queue = VecDeque::from([(id, vec![0u32; r])]);
    let mut states = 1usize;
    while let Some((x, used)) = queue.pop_front() {
        // skip states superseded after being queued
        if !frontier[&x].iter().any(|u| u == &used) {
            continue;
        }
        for (i, l) in &letters {
            if used[*i] >= spec.lengths[*i] {
                continue;
            }
            let mut u2 = used.clone();
            u2[*i] += 1;
            let y = g.mul(&x, l);
            let entry = frontier.entry(y.clone()).or_default();
            if entry.iter().any(|v| dominated(v, &u2)) {
                continue;
            }
            entry.retain(|v| !dominated(&u2, v));
            entry.push(u2.clone());
            states += 1;
            if states > cap || frontier.len() > cap {
                return Err(Error::cap("progression state space", cap));
            }
            queue.push_back((y, u2));
        }
    }
    let p = ElementSet::from_trusted(g, frontier.into_keys().collect());
    match &spec.kernel {
        Some(k) => k.product(&p),
        None => Ok(p),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoxProgressionReport {
    pub dimension: usize,
    pub size: usize,
    pub square_size: usize,
    pub doubling: Rat,
    /// `2^d|P|`.
    pub bound: u128,
    pub holds: bool,
}

/// Image of the box `∏[−L_i, L_i]` under `e_i ↦ x_i`, with `|PP| ≤ 2^d|P|`
/// checked.
pub fn box_progression(
    group: &Group,
    images: &[Element],
    lengths: &[u32],
) -> Result<(ElementSet, BoxProgressionReport)> {
    if images.len() != lengths.len() || images.is_empty() {
        return Err(Error::InvalidInput(
            "need one length per image, at least one image".into(),
        ));
    }
    for x in images {
        group.check(x)?;
    }
    for (i, x) in images.iter().enumerate() {
        for y in &images[i + 1..] {
            if group.mul(x, y) != group.mul(y, x) {
                return Err(Error::Precondition("box progression images do not commute".into()));
            }
        }
    }
    let volume: u128 = lengths.iter().map(|&l| 2 * l as u128 + 1).product();
    if volume > group.caps().max_work as u128 {
        return Err(Error::cap("box volume", group.caps().max_work));
    }
    let mut p = ElementSet::singleton(group, group.identity().clone());
    for (x, &l) in images.iter().zip(lengths) {
        let seg: Vec<Element> = (-(l as i64)..=l as i64).map(|k| group.pow(x, k)).collect();
        p = p.product(&ElementSet::from_trusted(group, seg))?;
    }
    let pp = p.product(&p)?;
    let d = images.len();
    let bound = (1u128 << d) * p.len() as u128;
    let holds = pp.len() as u128 <= bound;
    if !holds {
        return Err(Error::violation(
            "box progression |PP| <= 2^d|P|",
            json!({"images": images.iter().map(|x| group.to_json(x)).collect::<Vec<_>>(), "lengths": lengths}),
        ));
    }
    let report = BoxProgressionReport {
        dimension: d,
        size: p.len(),
        square_size: pp.len(),
        doubling: Rat::new(pp.len(), p.len()),
        bound,
        holds,
    };
    Ok((p, report))
}

/// Nilpotency class of `⟨gens⟩`: 0 for the trivial group.
pub fn nilpotency_class(group: &Group, gens: &[Element]) -> Result<usize> {
    let max_class = group.caps().max_nil_class;
    let commuting = gens
        .iter()
        .all(|x| gens.iter().all(|y| group.mul(x, y) == group.mul(y, x)));
    let trivial = gens.iter().all(|x| x == group.identity());
    if trivial {
        return Ok(0);
    }
    if commuting {
        return Ok(1);
    }
    match group.spec() {
        GroupSpec::HeisenbergZ => return Ok(2),
        GroupSpec::FreeGroup { .. } => {
            return Err(Error::Precondition(
                "non-commuting elements of a free group generate a non-nilpotent subgroup".into(),
            ))
        }
        _ => {}
    }
    if !group.is_finite() {
        return Err(Error::Precondition(format!(
            "nilpotency class is not computable for {}",
            group.spec().kind_name()
        )));
    }
    let span = subgroup_closure(group, &ElementSet::from_trusted(group, gens.to_vec()))?;
    let work = span.len() as u128 * span.len() as u128;
    if work > group.caps().max_work as u128 {
        return Err(Error::cap("lower central series commutators", group.caps().max_work));
    }
    let mut gamma = span.clone();
    for class in 1..=max_class {
        let comms: HashSet<Element> = span
            .iter()
            .flat_map(|x| gamma.iter().map(move |y| group.commutator(x, y)))
            .collect();
        let next = subgroup_closure(group, &ElementSet::from_trusted(group, comms.into_iter().collect()))?;
        if next.len() == 1 {
            return Ok(class);
        }
        if next.len() == gamma.len() {
            return Err(Error::Precondition("lower central series stalls: not nilpotent".into()));
        }
        gamma = next;
    }
    Err(Error::Precondition(format!("nilpotency class exceeds {max_class}")))
}

/// Side lengths below this are flagged as too small for the approximate
/// group bound to be expected.
pub const SMALL_SIDE: u32 = 4;

#[derive(Clone, Debug, Serialize)]
pub struct NilprogressionReport {
    pub rank: usize,
    pub class: usize,
    pub lengths: Vec<u32>,
    pub size: usize,
    pub square_size: usize,
    pub k_greedy: usize,
    pub small_side: bool,
}

pub fn nilprogression_check(spec: &ProgressionSpec) -> Result<NilprogressionReport> {
    let class = nilpotency_class(&spec.group, &spec.generators)?;
    let p = enumerate_progression(spec)?;
    let k = approx_constant(&p, false)?;
    Ok(NilprogressionReport {
        rank: spec.rank(),
        class,
        lengths: spec.lengths.clone(),
        size: p.len(),
        square_size: k.square_size,
        k_greedy: k.k_greedy,
        small_side: spec.lengths.iter().any(|&l| l < SMALL_SIDE),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    pub size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthProfile {
    pub table: Vec<GrowthRow>,
    pub window: (usize, usize),
    /// Least-squares slope of `log|Sⁿ|` against `log n` over the window.
    pub slope: Option<f64>,
    /// First `n` with `|Sⁿ⁺¹| = |Sⁿ|` when `1 ∈ S`.
    pub stabilized_at: Option<usize>,
}

pub fn loglog_slope(points: &[(usize, usize)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| (p.1 as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn growth_profile(s: &ElementSet, n_max: usize, window: (usize, usize)) -> Result<GrowthProfile> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    let mut pw = Powers::new(s.clone());
    let mut table = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        table.push(GrowthRow {
            n,
            size: pw.get(n)?.len(),
        });
    }
    let stabilized_at = if s.contains_identity() {
        table.windows(2).find(|w| w[0].size == w[1].size).map(|w| w[0].n)
    } else {
        None
    };
    let pts: Vec<(usize, usize)> = table
        .iter()
        .filter(|r| r.n >= window.0 && r.n <= window.1)
        .map(|r| (r.n, r.size))
        .collect();
    Ok(GrowthProfile {
        slope: loglog_slope(&pts),
        table,
        window,
        stabilized_at,
    })
}

/// Least `n ≤ n_max` with `|S^{4n}| ≤ 5^D|Sⁿ|`, compared exactly.
pub fn doubling_scale_finder(s: &ElementSet, d: &Rat, n_max: usize) -> Result<Option<usize>> {
    if !d.is_positive() {
        return Err(Error::InvalidInput("D must be positive".into()));
    }
    let (p, q) = (d.numer().clone(), d.denom().clone());
    let q = u32::try_from(&q).map_err(|_| Error::InvalidInput("denominator of D too large".into()))?;
    let p = u32::try_from(&p).map_err(|_| Error::InvalidInput("numerator of D too large".into()))?;
    let five_p = BigInt::from(5).pow(p);
    // |X|^q > 5^p |Sⁿ|^q
    let exceeds = |big: usize, small: usize| BigInt::from(big).pow(q) > &five_p * BigInt::from(small).pow(q);
    let monotone = s.contains_identity();
    let mut pw = Powers::new(s.clone());
    for n in 1..=n_max {
        let base = pw.get(n)?.len();
        if monotone {
            // Sᵐ ⊆ S^{4n} for m ≤ 4n, so one oversized power settles it.
            let mut m = n + 1;
            let mut failed = false;
            while m <= 4 * n {
                if exceeds(pw.get(m)?.len(), base) {
                    failed = true;
                    break;
                }
                m += 1;
            }
            if !failed {
                return Ok(Some(n));
            }
        } else if !exceeds(pw.get(4 * n)?.len(), base) {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScaleRow {
    pub n: usize,
    pub size: usize,
    pub square_size: usize,
    pub k_greedy: usize,
}

/// `n ↦ K_greedy(Sⁿ)` for `n` in the range, with `S` replaced by
/// `S ∪ S⁻¹ ∪ {1}`.
pub fn all_scales_report(s: &ElementSet, range: (usize, usize)) -> Result<Vec<ScaleRow>> {
    if range.0 == 0 || range.0 > range.1 {
        return Err(Error::InvalidInput(format!("bad range {range:?}")));
    }
    let mut pw = Powers::new(s.symmetrize());
    let mut rows = Vec::new();
    for n in range.0..=range.1 {
        let a = pw.get(n)?;
        let aa = pw.get(2 * n)?;
        let k = approx_constant_with_square(&a, &aa, false)?;
        rows.push(ScaleRow {
            n,
            size: a.len(),
            square_size: aa.len(),
            k_greedy: k.k_greedy,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct FreeGroupReport {
    pub size: usize,
    pub n: u32,
    /// `|Aⁿ|`, or a certified lower bound when `exact` is false.
    pub power_size: usize,
    pub exact: bool,
    /// `⌊(n+1)/2⌋`.
    pub exponent: u32,
    /// `|Aⁿ| ≥ (1/62)ⁿ|A|^⌊(n+1)/2⌋`.
    pub holds: bool,
    /// `|Aⁿ| / |A|^⌊(n+1)/2⌋` when exact.
    pub ratio: Option<f64>,
}

/// Product lower bound in a free group: `|Aⁿ| ≥ (1/62)ⁿ|A|^⌊(n+1)/2⌋`.
pub fn free_group_bounds(a: &ElementSet, n: u32) -> Result<FreeGroupReport> {
    let g = a.group();
    if !matches!(g.spec(), GroupSpec::FreeGroup { .. }) {
        return Err(Error::InvalidInput("free_group_bounds needs a free group".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if a.is_empty() {
        return Err(Error::InvalidInput("A must be nonempty".into()));
    }
    // Commuting elements of a free group lie in one cyclic subgroup.
    let cyclic = a.iter().all(|x| a.iter().all(|y| g.mul(x, y) == g.mul(y, x)));
    if cyclic {
        return Err(Error::Precondition("A lies in a cyclic subgroup".into()));
    }
    let exponent = n.div_ceil(2);
    let rhs = BigInt::from(a.len()).pow(exponent);
    let scale = BigInt::from(62).pow(n);
    let ok = |m: usize| BigInt::from(m) * &scale >= rhs;
    let cap = g.caps().max_elements;
    let mut pw = Powers::new(a.clone());
    let mut exact = true;
    let power_size = match pw.get(n as usize) {
        Ok(p) => p.len(),
        Err(Error::CapExceeded { .. }) => {
            // stream products of A^{n−1}·A until the threshold is certified
            exact = false;
            let prev = pw.get(n as usize - 1)?;
            let mut seen: HashSet<Element> = HashSet::new();
            'outer: for x in prev.iter() {
                for y in a.iter() {
                    seen.insert(g.mul(x, y));
                    if ok(seen.len()) || seen.len() >= cap {
                        break 'outer;
                    }
                }
            }
            seen.len()
        }
        Err(e) => return Err(e),
    };
    let holds = ok(power_size);
    if !holds && exact {
        return Err(Error::violation(
            "free group product bound |A^n| >= (1/62)^n |A|^[(n+1)/2]",
            json!({"a": a.to_json(), "n": n, "size": power_size}),
        ));
    }
    Ok(FreeGroupReport {
        size: a.len(),
        n,
        power_size,
        exact,
        exponent,
        holds,
        ratio: exact.then(|| power_size as f64 / (a.len() as f64).powi(exponent as i32)),
    })
}
