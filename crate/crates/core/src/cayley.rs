//! Cayley graphs of finite groups: balls, diameters, word metrics, the
//! ℓ∞-word metric, spectral gaps and the PSL₂ diameter table.

use crate::error::{Error, Result};
use crate::group::{Element, Group, GroupSpec};
use crate::progressions::{enumerate_progression, ProgressionSpec};
use crate::set::ElementSet;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;
use serde_json::json;
use std::collections::{HashMap, HashSet, VecDeque};

pub const UNREACHED: u32 = u32::MAX;

/// The component of the identity in `Cay(G, S)`, adjacency `g ~ gs`.
/// Vertices are ordered by distance from the identity, canonically within
/// each layer.
#[derive(Clone, Debug)]
pub struct CayleyGraph {
    pub group: Group,
    pub s: ElementSet,
    pub vertices: Vec<Element>,
    index: HashMap<Element, u32>,
    /// `n × |S|`, row `v` lists `v·s` for `s` in canonical order.
    pub neighbors: Vec<u32>,
    pub dist: Vec<u32>,
    /// Sphere sizes `|{g : d_S(e,g) = n}|`.
    pub layers: Vec<usize>,
    pub generates: bool,
}

impl CayleyGraph {
    /// `S` must be symmetric; `S` need not generate (see `generates`).
    pub fn build(group: &Group, s: &ElementSet) -> Result<CayleyGraph> {
        if s.group() != group {
            return Err(Error::GroupMismatch);
        }
        let order = group
            .order()
            .ok_or_else(|| Error::Precondition("Cayley graphs are built for finite groups only".into()))?;
        if s.is_empty() {
            return Err(Error::InvalidInput("generating set is empty".into()));
        }
        if !s.is_symmetric() {
            return Err(Error::Precondition("S must be symmetric".into()));
        }
        let cap = group.caps().max_elements;
        let gens = s.to_vec();
        let mut index: HashMap<Element, u32> = HashMap::new();
        let mut vertices = Vec::new();
        let mut dist = Vec::new();
        let mut layers = Vec::new();
        let mut layer = vec![group.identity().clone()];
        let mut d = 0u32;
        while !layer.is_empty() {
            layer.sort();
            if vertices.len() + layer.len() > cap {
                return Err(Error::cap("Cayley graph vertices", cap));
            }
            layers.push(layer.len());
            for x in &layer {
                index.insert(x.clone(), vertices.len() as u32);
                vertices.push(x.clone());
                dist.push(d);
            }
            let mut next: HashSet<Element> = HashSet::new();
            for x in &layer {
                for g in &gens {
                    let y = group.mul(x, g);
                    if !index.contains_key(&y) {
                        next.insert(y);
                    }
                }
            }
            layer = next.into_iter().collect();
            d += 1;
        }
        let mut neighbors = Vec::with_capacity(vertices.len() * gens.len());
        for x in &vertices {
            for g in &gens {
                neighbors.push(index[&group.mul(x, g)]);
            }
        }
        Ok(CayleyGraph {
            group: group.clone(),
            s: s.clone(),
            generates: vertices.len() as u128 == order,
            vertices,
            index,
            neighbors,
            dist,
            layers,
        })
    }

    /// Like [`CayleyGraph::build`] but failing unless `S` generates.
    pub fn new(group: &Group, s: &ElementSet) -> Result<CayleyGraph> {
        let x = Self::build(group, s)?;
        if !x.generates {
            return Err(Error::Precondition(format!(
                "S generates a subgroup of order {} only",
                x.vertices.len()
            )));
        }
        Ok(x)
    }

    /// `Cay(G, S)` with `S` the symmetrized standard generators.
    pub fn standard(group: &Group) -> Result<CayleyGraph> {
        let gens = ElementSet::new(group, group.standard_generators())?;
        let s = gens.union(&gens.inverse())?;
        Self::new(group, &s)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.s.len()
    }

    pub fn has_loops(&self) -> bool {
        self.s.contains_identity()
    }

    pub fn diameter(&self) -> u32 {
        (self.layers.len() - 1) as u32
    }

    pub fn index_of(&self, g: &Element) -> Option<usize> {
        self.index.get(g).map(|&i| i as usize)
    }

    pub fn neighbors_of(&self, v: usize) -> &[u32] {
        let k = self.degree();
        &self.neighbors[v * k..(v + 1) * k]
    }

    /// `d_S(g, h) = d_S(e, g⁻¹h)`; `None` across components.
    pub fn distance(&self, g: &Element, h: &Element) -> Option<u32> {
        let x = self.group.mul(&self.group.inv(g), h);
        self.index_of(&x).map(|i| self.dist[i])
    }

    /// Distances from vertex `v` by BFS over the neighbor table.
    pub fn distances_from(&self, v: usize) -> Vec<u32> {
        let mut out = vec![UNREACHED; self.len()];
        out[v] = 0;
        let mut queue = VecDeque::from([v as u32]);
        while let Some(x) = queue.pop_front() {
            let dx = out[x as usize];
            for &y in self.neighbors_of(x as usize) {
                if out[y as usize] == UNREACHED {
                    out[y as usize] = dx + 1;
                    queue.push_back(y);
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BallRow {
    pub n: u32,
    pub sphere: usize,
    pub ball: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiameterReport {
    pub order: usize,
    pub generators: usize,
    pub loops: bool,
    pub diameter: u32,
    pub balls: Vec<BallRow>,
}

pub fn ball_diameter(x: &CayleyGraph) -> Result<DiameterReport> {
    if !x.generates {
        return Err(Error::Precondition("S does not generate".into()));
    }
    let mut ball = 0;
    let balls = x
        .layers
        .iter()
        .enumerate()
        .map(|(n, &sphere)| {
            ball += sphere;
            BallRow {
                n: n as u32,
                sphere,
                ball,
            }
        })
        .collect();
    Ok(DiameterReport {
        order: x.len(),
        generators: x.degree(),
        loops: x.has_loops(),
        diameter: x.diameter(),
        balls,
    })
}

/// `d_S(g, h)` in any group by bidirectional BFS, `S` symmetrized; `None`
/// when the search exceeds `max_radius` or the element cap.
pub fn word_distance(group: &Group, s: &ElementSet, g: &Element, h: &Element, max_radius: u32) -> Result<Option<u32>> {
    let gens: Vec<Element> = s
        .symmetrize()
        .iter()
        .filter(|x| *x != group.identity())
        .cloned()
        .collect();
    let target = group.mul(&group.inv(g), h);
    if &target == group.identity() {
        return Ok(Some(0));
    }
    let cap = group.caps().max_elements;
    // fwd grows from e by right multiplication, bwd from the target by right
    // multiplication with inverses (S is symmetric).
    let mut fwd: HashMap<Element, u32> = HashMap::from([(group.identity().clone(), 0)]);
    let mut bwd: HashMap<Element, u32> = HashMap::from([(target.clone(), 0)]);
    let mut ff = vec![group.identity().clone()];
    let mut bf = vec![target];
    let (mut rf, mut rb) = (0u32, 0u32);
    while rf + rb < max_radius && !ff.is_empty() && !bf.is_empty() {
        let forward = ff.len() <= bf.len();
        let (front, seen, other, r) = if forward {
            (&mut ff, &mut fwd, &bwd, &mut rf)
        } else {
            (&mut bf, &mut bwd, &fwd, &mut rb)
        };
        *r += 1;
        let mut next = Vec::new();
        let mut best: Option<u32> = None;
        for x in front.iter() {
            for t in &gens {
                let y = group.mul(x, t);
                if seen.contains_key(&y) {
                    continue;
                }
                if let Some(&d) = other.get(&y) {
                    best = Some(best.map_or(*r + d, |b: u32| b.min(*r + d)));
                }
                seen.insert(y.clone(), *r);
                next.push(y);
            }
        }
        if let Some(b) = best {
            return Ok(Some(b));
        }
        if fwd.len() + bwd.len() > cap {
            return Err(Error::cap("word distance search", cap));
        }
        if forward {
            ff = next;
        } else {
            bf = next;
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize)]
pub struct LinfReport {
    pub element: serde_json::Value,
    pub rank: usize,
    pub linf: u32,
    pub word: u32,
    pub holds: bool,
}

/// Least `N` with `g ∈ P(x₁,…,x_r; N,…,N)`, with `d^∞ ≤ d_S ≤ r·d^∞`
/// checked against the word metric of `{x_i^{±1}}`.
pub fn linf_word_metric(group: &Group, gens: &[Element], g: &Element, max_radius: u32) -> Result<LinfReport> {
    let r = gens.len();
    if r == 0 || r > 3 {
        return Err(Error::InvalidInput(format!("need 1 to 3 generators, got {r}")));
    }
    group.check(g)?;
    let s = ElementSet::new(group, gens.to_vec())?;
    let word = word_distance(group, &s, group.identity(), g, max_radius)?
        .ok_or_else(|| Error::Precondition(format!("element unreachable within radius {max_radius}")))?;
    // d^∞ ≤ d_S, so the search terminates by N = d_S.
    let mut linf = None;
    for n in 0..=word {
        let spec = ProgressionSpec::new(group, gens.to_vec(), vec![n; r])?;
        if enumerate_progression(&spec)?.contains(g) {
            linf = Some(n);
            break;
        }
    }
    let element = group.to_json(g);
    let Some(linf) = linf else {
        return Err(Error::violation(
            "d_inf <= d_S",
            json!({"element": element, "word": word}),
        ));
    };
    let holds = linf <= word && word as u64 <= r as u64 * linf as u64;
    if !holds {
        return Err(Error::violation(
            "d_inf <= d_S <= r d_inf",
            json!({"element": element, "linf": linf, "word": word}),
        ));
    }
    Ok(LinfReport {
        element,
        rank: r,
        linf,
        word,
        holds,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenMethod {
    Dense,
    PowerIteration,
    /// Disconnected graph: λ₁ = 0 without a solve.
    Exact,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub vertices: usize,
    pub degree: usize,
    pub loops: bool,
    pub connected: bool,
    pub lambda1: f64,
    pub diameter: Option<u32>,
    /// `1/(8 diam²)`.
    pub bound: Option<f64>,
    pub holds: bool,
    pub method: EigenMethod,
}

pub const EIGEN_TOL: f64 = 1e-9;
pub const POWER_MAX_ITER: usize = 100_000;

/// Second-smallest eigenvalue of `I − M/|S|` on `G`, with
/// `λ₁ ≥ 1/(8 diam²) − 10⁻⁹` checked on connected graphs.
pub fn spectral_gap(x: &CayleyGraph) -> Result<SpectralReport> {
    let caps = x.group.caps();
    let n = x.len();
    let mut report = SpectralReport {
        vertices: x.group.order().map_or(n, |o| o as usize),
        degree: x.degree(),
        loops: x.has_loops(),
        connected: x.generates,
        lambda1: 0.0,
        diameter: None,
        bound: None,
        holds: true,
        method: EigenMethod::Exact,
    };
    if !x.generates || n == 1 {
        // a disconnected graph has a second zero eigenvalue; one vertex has
        // no second eigenvalue and is reported as 0
        return Ok(report);
    }
    if n > caps.iterative_eigen_vertices {
        return Err(Error::cap("spectral gap vertices", caps.iterative_eigen_vertices));
    }
    let (lambda1, method) = if n <= caps.dense_eigen_vertices {
        (dense_gap(x), EigenMethod::Dense)
    } else {
        (power_gap(x)?, EigenMethod::PowerIteration)
    };
    let diam = x.diameter();
    let bound = 1.0 / (8.0 * (diam as f64).powi(2));
    report.lambda1 = lambda1;
    report.diameter = Some(diam);
    report.bound = Some(bound);
    report.method = method;
    report.holds = lambda1 >= bound - EIGEN_TOL;
    if !report.holds {
        return Err(Error::violation(
            "lambda1 >= 1/(8 diam^2)",
            json!({"group": x.group.spec(), "lambda1": lambda1, "diameter": diam}),
        ));
    }
    Ok(report)
}

fn dense_gap(x: &CayleyGraph) -> f64 {
    let n = x.len();
    let k = x.degree() as f64;
    let mut l = DMatrix::<f64>::identity(n, n);
    for v in 0..n {
        for &w in x.neighbors_of(v) {
            l[(v, w as usize)] -= 1.0 / k;
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(l).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev[1].max(0.0)
}

/// Power iteration for the lazy walk `(I + M/|S|)/2` on the complement of
/// the constants; its top eigenvalue there is `1 − λ₁/2`.
fn power_gap(x: &CayleyGraph) -> Result<f64> {
    let n = x.len();
    let k = x.degree() as f64;
    let deflate = |v: &mut Vec<f64>| {
        let mean = v.iter().sum::<f64>() / n as f64;
        v.iter_mut().for_each(|a| *a -= mean);
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
    };
    // deterministic start with no constant component
    let mut v: Vec<f64> = (0..n)
        .map(|i| ((i as f64 + 1.0) * 0.618_033_988_75).fract() - 0.5)
        .collect();
    deflate(&mut v);
    let mut prev = f64::NAN;
    for _ in 0..POWER_MAX_ITER {
        let mut w = vec![0.0; n];
        for (i, wi) in w.iter_mut().enumerate() {
            let s: f64 = x.neighbors_of(i).iter().map(|&j| v[j as usize]).sum();
            *wi = 0.5 * v[i] + 0.5 * s / k;
        }
        let rayleigh: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
        deflate(&mut w);
        v = w;
        if (rayleigh - prev).abs() < EIGEN_TOL * 1e-3 {
            return Ok((2.0 * (1.0 - rayleigh)).max(0.0));
        }
        prev = rayleigh;
    }
    Err(Error::NonConvergence(format!(
        "power iteration did not settle within {POWER_MAX_ITER} steps"
    )))
}

#[derive(Clone, Debug, Serialize)]
pub struct BabaiRow {
    pub p: u64,
    pub order: usize,
    pub diameter: u32,
    pub log_order: f64,
    pub diam_over_log: f64,
    pub loglog_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BabaiReport {
    pub rows: Vec<BabaiRow>,
    /// Orders increase with `p`.
    pub monotone: bool,
}

/// Diameters of `PSL₂(p)` with `S = {U^{±1}, L^{±1}}`.
pub fn babai_report(primes: &[u64], caps: &crate::Caps) -> Result<BabaiReport> {
    let mut rows = Vec::with_capacity(primes.len());
    for &p in primes {
        let g = Group::with_caps(GroupSpec::Psl2 { p }, caps.clone())?;
        let x = CayleyGraph::standard(&g)?;
        let order = x.len();
        let diameter = x.diameter();
        let log_order = (order as f64).ln();
        rows.push(BabaiRow {
            p,
            order,
            diameter,
            log_order,
            diam_over_log: diameter as f64 / log_order,
            loglog_ratio: (diameter as f64).ln() / log_order.ln(),
        });
    }
    let mut sorted: Vec<&BabaiRow> = rows.iter().collect();
    sorted.sort_by_key(|r| r.p);
    let monotone = sorted.windows(2).all(|w| w[0].order < w[1].order);
    Ok(BabaiReport { rows, monotone })
}

#[cfg(test)]
mod tests;
