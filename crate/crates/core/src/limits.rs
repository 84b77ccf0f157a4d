//! Rescaled Cayley graphs as finite metric spaces, covering numbers,
//! Gromov–Hausdorff bounds against flat Finsler tori and limit-norm
//! extraction on lattices.

use crate::cayley::{word_distance, CayleyGraph, UNREACHED};
use crate::error::{Error, Result};
use crate::group::{Element, Group, GroupSpec};
use crate::rational::Rat;
use crate::set::ElementSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Point count up to which every triple is checked.
pub const EXHAUSTIVE_TRIANGLE_POINTS: usize = 128;
pub const SAMPLED_TRIANGLES: usize = 100_000;
const TRIANGLE_SEED: u64 = 0x7472_6961;
const FLOAT_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub enum Distances {
    /// `d(i, j) = num[i·n + j] / den`.
    Rational {
        num: Vec<u16>,
        den: u32,
    },
    Float(Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    pub labels: Vec<String>,
    pub dist: Distances,
}

impl FiniteMetricSpace {
    pub fn rational(labels: Vec<String>, num: Vec<u16>, den: u32) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Self::checked(labels, Distances::Rational { num, den })
    }

    pub fn float(labels: Vec<String>, d: Vec<f64>) -> Result<Self> {
        if d.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidInput("distances must be finite and nonnegative".into()));
        }
        Self::checked(labels, Distances::Float(d))
    }

    fn checked(labels: Vec<String>, dist: Distances) -> Result<Self> {
        let n = labels.len();
        let len = match &dist {
            Distances::Rational { num, .. } => num.len(),
            Distances::Float(d) => d.len(),
        };
        if len != n * n {
            return Err(Error::InvalidInput(format!(
                "{n} points need {} distances, got {len}",
                n * n
            )));
        }
        let x = FiniteMetricSpace { labels, dist };
        x.verify()?;
        Ok(x)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        let n = self.len();
        match &self.dist {
            Distances::Rational { num, den } => num[i * n + j] as f64 / *den as f64,
            Distances::Float(d) => d[i * n + j],
        }
    }

    /// Exact distance for rational spaces.
    pub fn exact(&self, i: usize, j: usize) -> Option<Rat> {
        match &self.dist {
            Distances::Rational { num, den } => Some(Rat::new(num[i * self.len() + j], *den)),
            Distances::Float(_) => None,
        }
    }

    pub fn diameter(&self) -> f64 {
        let n = self.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.d(i, j))
            .fold(0.0, f64::max)
    }

    /// Zero diagonal, symmetry, positivity and the triangle inequality, exact
    /// for rational spaces. All triples up to 128 points, sampled above.
    pub fn verify(&self) -> Result<()> {
        let n = self.len();
        let fail = |what: &str, pts: &[usize]| {
            Err(Error::violation(
                format!("metric axiom: {what}"),
                json!(pts.iter().map(|&i| self.labels[i].clone()).collect::<Vec<_>>()),
            ))
        };
        // integer comparisons on rational spaces, tolerant ones on floats
        let le = |a: (usize, usize), b: (usize, usize), c: (usize, usize)| match &self.dist {
            Distances::Rational { num, .. } => {
                num[a.0 * n + a.1] as u32 <= num[b.0 * n + b.1] as u32 + num[c.0 * n + c.1] as u32
            }
            Distances::Float(d) => d[a.0 * n + a.1] <= d[b.0 * n + b.1] + d[c.0 * n + c.1] + FLOAT_TOL,
        };
        for i in 0..n {
            if self.d(i, i) != 0.0 {
                return fail("d(x,x) = 0", &[i]);
            }
            for j in 0..i {
                let (a, b) = (self.d(i, j), self.d(j, i));
                if (a - b).abs() > FLOAT_TOL || a <= 0.0 {
                    return fail("symmetry and positivity", &[i, j]);
                }
            }
        }
        let triple = |i: usize, j: usize, k: usize| le((i, k), (i, j), (j, k));
        if n <= EXHAUSTIVE_TRIANGLE_POINTS {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if !triple(i, j, k) {
                            return fail("triangle inequality", &[i, j, k]);
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(TRIANGLE_SEED);
            for _ in 0..SAMPLED_TRIANGLES {
                let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if !triple(i, j, k) {
                    return fail("triangle inequality", &[i, j, k]);
                }
            }
        }
        Ok(())
    }

    /// Every distinct distance value, ascending.
    pub fn distance_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = match &self.dist {
            Distances::Rational { num, den } => {
                let mut k: Vec<u16> = num.clone();
                k.sort_unstable();
                k.dedup();
                k.into_iter().map(|x| x as f64 / *den as f64).collect()
            }
            Distances::Float(d) => d.clone(),
        };
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionConstant {
    pub d: u32,
    /// Least `C` with `|X|/deg ≤ C·diam^d`.
    pub c: Rat,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub size: usize,
    pub degree: usize,
    pub diameter: u32,
    pub size_over_degree: Rat,
    pub constants: Vec<DimensionConstant>,
}

pub fn condition_values(x: &CayleyGraph) -> ConditionReport {
    let degree = x.s.iter().filter(|g| *g != x.group.identity()).count().max(1);
    let diameter = x.diameter();
    let ratio = Rat::new(x.len(), degree);
    let constants = (1..=4)
        .map(|d| DimensionConstant {
            d,
            c: if diameter == 0 {
                ratio.clone()
            } else {
                &ratio / &Rat::int(num_bigint::BigInt::from(diameter).pow(d))
            },
        })
        .collect();
    ConditionReport {
        size: x.len(),
        degree,
        diameter,
        size_over_degree: ratio,
        constants,
    }
}

/// `d_S/diam` on the vertices of a connected Cayley graph, points in
/// canonical order.
pub fn rescaled_space(x: &CayleyGraph) -> Result<(FiniteMetricSpace, ConditionReport)> {
    if !x.generates {
        return Err(Error::Precondition("Cayley graph is disconnected".into()));
    }
    let n = x.len();
    let cap = x.group.caps().max_metric_points;
    if n > cap {
        return Err(Error::cap("metric space points", cap));
    }
    let diam = x.diameter();
    if diam >= u16::MAX as u32 {
        return Err(Error::cap("graph diameter", u16::MAX - 1));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x.vertices[a].cmp(&x.vertices[b]));
    let mut pos = vec![0usize; n];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    let mut num = vec![0u16; n * n];
    for (p, &v) in order.iter().enumerate() {
        for (w, &d) in x.distances_from(v).iter().enumerate() {
            debug_assert_ne!(d, UNREACHED);
            num[p * n + pos[w]] = d as u16;
        }
    }
    let labels = order
        .iter()
        .map(|&v| x.group.to_json(&x.vertices[v]).to_string())
        .collect();
    let space = FiniteMetricSpace::rational(labels, num, diam.max(1))?;
    Ok((space, condition_values(x)))
}

/// Greedy max-coverage ε-net at radius exactly `r` (ties to the least point).
fn greedy_net(x: &FiniteMetricSpace, within: impl Fn(usize, usize) -> bool) -> usize {
    let n = x.len();
    let mut covered = vec![false; n];
    let mut left = n;
    let gain = |i: usize, covered: &[bool]| (0..n).filter(|&j| !covered[j] && within(i, j)).count();
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> = (0..n).map(|i| (gain(i, &covered), Reverse(i))).collect();
    let mut count = 0;
    while left > 0 {
        let (stale, Reverse(i)) = heap.pop().expect("uncovered points remain");
        let g = gain(i, &covered);
        if g < stale {
            heap.push((g, Reverse(i)));
            continue;
        }
        count += 1;
        for (j, c) in covered.iter_mut().enumerate() {
            if !*c && within(i, j) {
                *c = true;
                left -= 1;
            }
        }
    }
    count
}

/// Upper bound on the number of ε-balls needed to cover `X`: the best
/// greedy net over every distance level `≤ ε`, so the count is
/// nonincreasing in `ε`.
pub fn covering_number(x: &FiniteMetricSpace, eps: &Rat) -> Result<usize> {
    if !eps.is_positive() {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let n = x.len();
    if n == 0 {
        return Ok(0);
    }
    let best = match &x.dist {
        Distances::Rational { num, den } => {
            // levels k/den ≤ eps
            let kmax = (eps * &Rat::int(*den)).floor();
            let kmax: u32 = kmax.try_into().unwrap_or(u32::MAX);
            let mut levels: Vec<u16> = num.clone();
            levels.sort_unstable();
            levels.dedup();
            levels
                .into_iter()
                .filter(|&k| k as u32 <= kmax)
                .map(|k| greedy_net(x, |i, j| num[i * n + j] <= k))
                .min()
                .unwrap_or(n)
        }
        Distances::Float(d) => {
            let e = eps.to_f64();
            x.distance_values()
                .into_iter()
                .filter(|&t| t <= e)
                .map(|t| greedy_net(x, |i, j| d[i * n + j] <= t))
                .min()
                .unwrap_or(n)
        }
    };
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct CoveringRow {
    pub eps: Rat,
    pub count: usize,
    /// `N(ε)/N(2ε)`.
    pub ratio: f64,
}

pub fn covering_profile(x: &FiniteMetricSpace, radii: &[Rat]) -> Result<Vec<CoveringRow>> {
    radii
        .iter()
        .map(|eps| {
            let count = covering_number(x, eps)?;
            let twice = covering_number(x, &(eps * &Rat::int(2)))?;
            Ok(CoveringRow {
                eps: eps.clone(),
                count,
                ratio: count as f64 / twice as f64,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Norm {
    L1,
    L2,
    Linf,
    /// `‖x‖ = max_i |⟨f_i, x⟩|`.
    Polyhedral(Vec<Vec<f64>>),
}

impl Norm {
    pub fn eval(&self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|x| x.abs()).sum(),
            Norm::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            Norm::Polyhedral(fs) => fs
                .iter()
                .map(|f| f.iter().zip(v).map(|(a, b)| a * b).sum::<f64>().abs())
                .fold(0.0, f64::max),
        }
    }
}

/// `R^q/Z^q` with the quotient distance of a norm.
#[derive(Clone, Debug, Serialize)]
pub struct TorusModel {
    pub q: usize,
    pub norm: Norm,
    /// Unnormalized torus diameter.
    pub diameter: f64,
    /// Bound on the error of `diameter` (0 when exact).
    pub diameter_error: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TorusJson {
    q: usize,
    norm: Norm,
}

/// Grid resolution per axis used to locate a polyhedral torus diameter.
const DIAMETER_GRID: usize = 64;

impl TorusModel {
    pub fn new(q: usize, norm: Norm) -> Result<TorusModel> {
        if q == 0 || q > 3 {
            return Err(Error::InvalidInput(format!("torus dimension {q} outside 1..=3")));
        }
        let (diameter, diameter_error) = match &norm {
            Norm::L1 => (q as f64 / 2.0, 0.0),
            Norm::L2 => ((q as f64).sqrt() / 2.0, 0.0),
            Norm::Linf => (0.5, 0.0),
            Norm::Polyhedral(fs) => {
                if fs.iter().any(|f| f.len() != q || f.iter().any(|x| !x.is_finite())) {
                    return Err(Error::InvalidInput(format!("functionals must have length {q}")));
                }
                let m = nalgebra::DMatrix::from_fn(fs.len(), q, |i, j| fs[i][j]);
                if fs.is_empty() || m.rank(1e-9) < q {
                    return Err(Error::InvalidInput("functionals do not define a norm".into()));
                }
                let t = TorusModel {
                    q,
                    norm: norm.clone(),
                    diameter: 1.0,
                    diameter_error: 0.0,
                };
                let mut best = 0.0f64;
                let steps = DIAMETER_GRID + 1;
                for idx in 0..steps.pow(q as u32) {
                    let mut rem = idx;
                    let p: Vec<f64> = (0..q)
                        .map(|_| {
                            let c = rem % steps;
                            rem /= steps;
                            c as f64 / DIAMETER_GRID as f64 - 0.5
                        })
                        .collect();
                    best = best.max(t.raw_distance(&p));
                }
                // 1-Lipschitz in the norm; the nearest grid point is within
                // half a step along each axis
                let err = (0..q)
                    .map(|i| {
                        let mut e = vec![0.0; q];
                        e[i] = 0.5 / DIAMETER_GRID as f64;
                        norm.eval(&e)
                    })
                    .sum();
                (best, err)
            }
        };
        let t = TorusModel {
            q,
            norm,
            diameter,
            diameter_error,
        };
        t.check_norm_samples()?;
        Ok(t)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<TorusModel> {
        let t: TorusJson = serde_json::from_value(v.clone())?;
        TorusModel::new(t.q, t.norm)
    }

    /// Positivity, homogeneity and convexity on a fixed sample.
    fn check_norm_samples(&self) -> Result<()> {
        let q = self.q;
        let samples: Vec<Vec<f64>> = (0..3usize.pow(q as u32))
            .map(|i| {
                (0..q)
                    .map(|k| (((i / 3usize.pow(k as u32)) % 3) as f64 - 1.0) * (1.0 + 0.37 * k as f64))
                    .collect()
            })
            .collect();
        for v in &samples {
            let nv = self.norm.eval(v);
            let zero = v.iter().all(|x| *x == 0.0);
            if zero != (nv == 0.0)
                || (self.norm.eval(&v.iter().map(|x| -2.5 * x).collect::<Vec<_>>()) - 2.5 * nv).abs() > 1e-9
            {
                return Err(Error::InvalidInput("norm fails positivity or homogeneity".into()));
            }
            for w in &samples {
                let s: Vec<f64> = v.iter().zip(w).map(|(a, b)| a + b).collect();
                if self.norm.eval(&s) > nv + self.norm.eval(w) + 1e-9 {
                    return Err(Error::InvalidInput("norm fails convexity".into()));
                }
            }
        }
        Ok(())
    }

    /// `min_u ‖δ + u‖` with `δ` reduced to `[−1/2, 1/2]^q` and `u ∈ {−1,0,1}^q`.
    fn raw_distance(&self, delta: &[f64]) -> f64 {
        let q = self.q;
        let base: Vec<f64> = delta.iter().map(|x| x - x.round()).collect();
        let mut best = f64::INFINITY;
        for idx in 0..3usize.pow(q as u32) {
            let v: Vec<f64> = (0..q)
                .map(|k| base[k] + ((idx / 3usize.pow(k as u32)) % 3) as f64 - 1.0)
                .collect();
            best = best.min(self.norm.eval(&v));
        }
        best
    }

    /// Quotient distance scaled to diameter 1.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let delta: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.raw_distance(&delta) / self.diameter
    }
}

/// Facet functionals of `conv(S)` for `S ⊂ Z^q`, q ≤ 3: its gauge is the
/// limit norm of the word metric. Recognizes ℓ¹ and ℓ∞ exactly.
pub fn fit_norm(q: usize, s: &[Vec<i64>]) -> Result<Norm> {
    let pts: Vec<Vec<f64>> = s
        .iter()
        .filter(|v| v.iter().any(|&x| x != 0))
        .map(|v| v.iter().map(|&x| x as f64).collect())
        .collect();
    if pts.iter().any(|v| v.len() != q) {
        return Err(Error::InvalidInput(format!("generators must have {q} coordinates")));
    }
    let mut facets: Vec<Vec<f64>> = Vec::new();
    let mut choose = vec![0usize; q];
    let total = pts.len().pow(q as u32);
    for idx in 0..total {
        let mut rem = idx;
        for c in choose.iter_mut() {
            *c = rem % pts.len();
            rem /= pts.len();
        }
        if choose.windows(2).any(|w| w[0] >= w[1]) {
            continue;
        }
        let m = nalgebra::DMatrix::from_fn(q, q, |i, j| pts[choose[i]][j]);
        let Some(inv) = m.try_inverse() else { continue };
        let f: Vec<f64> = (0..q).map(|j| (0..q).map(|i| inv[(j, i)]).sum()).collect();
        let ok = pts
            .iter()
            .all(|p| p.iter().zip(&f).map(|(a, b)| a * b).sum::<f64>() <= 1.0 + 1e-9);
        if ok
            && !facets
                .iter()
                .any(|g| g.iter().zip(&f).all(|(a, b)| (a - b).abs() < 1e-9))
        {
            facets.push(f);
        }
    }
    if facets.is_empty() {
        return Err(Error::Precondition("generators do not span R^q".into()));
    }
    let is = |want: &dyn Fn(&[f64]) -> bool, count: usize| facets.len() == count && facets.iter().all(|f| want(f));
    let unit_signs = |f: &[f64]| f.iter().all(|x| (x.abs() - 1.0).abs() < 1e-9);
    let unit_axis = |f: &[f64]| {
        f.iter().filter(|x| (x.abs() - 1.0).abs() < 1e-9).count() == 1
            && f.iter().filter(|x| x.abs() < 1e-9).count() == q - 1
    };
    if is(&unit_signs, 1 << q) {
        return Ok(Norm::L1);
    }
    if is(&unit_axis, 2 * q) {
        return Ok(Norm::Linf);
    }
    Ok(Norm::Polyhedral(facets))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn identity(n: usize) -> Self {
        Correspondence {
            pairs: (0..n).map(|i| (i, i)).collect(),
        }
    }

    pub fn check_total(&self, nx: usize, ny: usize) -> Result<()> {
        let mut lx = vec![false; nx];
        let mut ly = vec![false; ny];
        for &(a, b) in &self.pairs {
            if a >= nx || b >= ny {
                return Err(Error::InvalidInput(format!("pair ({a}, {b}) out of range")));
            }
            lx[a] = true;
            ly[b] = true;
        }
        if lx.iter().chain(&ly).any(|x| !x) {
            return Err(Error::InvalidInput("correspondence is not total on both sides".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GhBounds {
    pub upper: f64,
    pub lower: f64,
    pub distortion: f64,
    /// Covering radius of the image in the torus (torus targets only).
    pub covering_radius: f64,
    pub discretization_error: f64,
    pub diameter_term: f64,
    /// Half the Hausdorff distance between the sets of distance values.
    pub value_gap_term: f64,
    /// Half the L¹ distance of 64-bin distance histograms. Heuristic only.
    pub histogram_heuristic: f64,
}

pub const HISTOGRAM_BINS: usize = 64;

fn histogram(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut h = vec![0.0; HISTOGRAM_BINS];
    let mut total = 0.0f64;
    for v in values {
        let b = ((v * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
        h[b] += 1.0;
        total += 1.0;
    }
    h.iter_mut().for_each(|x| *x /= total.max(1.0));
    h
}

fn histogram_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0
}

/// Hausdorff distance between two sorted finite subsets of R.
fn hausdorff_sorted(a: &[f64], b: &[f64]) -> f64 {
    let one_side = |a: &[f64], b: &[f64]| {
        a.iter()
            .map(|x| {
                let i = b.partition_point(|y| y < x);
                let mut best = f64::INFINITY;
                if i < b.len() {
                    best = best.min(b[i] - x);
                }
                if i > 0 {
                    best = best.min(x - b[i - 1]);
                }
                best
            })
            .fold(0.0, f64::max)
    };
    one_side(a, b).max(one_side(b, a))
}

fn check_order(g: GhBounds) -> Result<GhBounds> {
    if g.lower > g.upper + 1e-12 {
        return Err(Error::violation(
            "gh lower <= upper",
            json!({"lower": g.lower, "upper": g.upper}),
        ));
    }
    Ok(g)
}

/// GH bounds between two finite spaces under an explicit correspondence.
pub fn gh_bounds_spaces(x: &FiniteMetricSpace, y: &FiniteMetricSpace, corr: &Correspondence) -> Result<GhBounds> {
    corr.check_total(x.len(), y.len())?;
    let mut distortion = 0.0f64;
    for &(a, b) in &corr.pairs {
        for &(c, d) in &corr.pairs {
            distortion = distortion.max((x.d(a, c) - y.d(b, d)).abs());
        }
    }
    let diameter_term = (x.diameter() - y.diameter()).abs() / 2.0;
    let value_gap_term = hausdorff_sorted(&x.distance_values(), &y.distance_values()) / 2.0;
    let scale = |s: &FiniteMetricSpace| {
        let d = s.diameter();
        let n = s.len();
        histogram(
            (0..n)
                .flat_map(move |i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| if d > 0.0 { s.d(i, j) / d } else { 0.0 })
                .collect::<Vec<_>>()
                .into_iter(),
        )
    };
    check_order(GhBounds {
        upper: distortion / 2.0,
        lower: diameter_term.max(value_gap_term),
        distortion,
        covering_radius: 0.0,
        discretization_error: 0.0,
        diameter_term,
        value_gap_term,
        histogram_heuristic: histogram_gap(&scale(x), &scale(y)),
    })
}

/// Torus coordinates of every vertex and the moduli of the image lattice,
/// which must be the full product `∏ (1/m_i)Z/Z`.
fn image_lattice(x: &CayleyGraph, q: usize) -> Result<(Vec<Vec<f64>>, Vec<u64>)> {
    let missing = || Error::Precondition(format!("no built-in correspondence for {}", x.group.spec().kind_name()));
    let coords: Vec<Vec<f64>> = x
        .vertices
        .iter()
        .map(|g| x.group.torus_coordinates(g).ok_or_else(missing))
        .collect::<Result<_>>()?;
    let lat = x.group.torus_lattice(x.group.identity()).ok_or_else(missing)?;
    let moduli: Vec<u64> = lat.iter().map(|p| p.1).collect();
    if moduli.len() != q {
        return Err(Error::InvalidInput(format!(
            "torus has dimension {q}, group maps to dimension {}",
            moduli.len()
        )));
    }
    let mut distinct: Vec<Vec<(i64, u64)>> = x.vertices.iter().filter_map(|g| x.group.torus_lattice(g)).collect();
    distinct.sort();
    distinct.dedup();
    if distinct.len() as u128 != moduli.iter().map(|&m| m as u128).product::<u128>() {
        return Err(Error::Precondition("image is not a full product lattice".into()));
    }
    Ok((coords, moduli))
}

/// GH bounds between a rescaled abelianizable Cayley graph and a torus,
/// through the correspondence relating `g` to the Voronoi cell of its
/// torus coordinates. The torus coordinate map is a homomorphism, so the
/// distortion is a maximum over distances from the identity.
pub fn gh_bounds_torus(x: &CayleyGraph, t: &TorusModel) -> Result<GhBounds> {
    if !x.generates {
        return Err(Error::Precondition("Cayley graph is disconnected".into()));
    }
    let (coords, moduli) = image_lattice(x, t.q)?;
    let diam = x.diameter().max(1) as f64;
    let origin = vec![0.0; t.q];
    let mut distortion = 0.0f64;
    for (i, c) in coords.iter().enumerate() {
        distortion = distortion.max((x.dist[i] as f64 / diam - t.distance(&origin, c)).abs());
    }
    let half: Vec<f64> = moduli.iter().map(|&m| 0.5 / m as f64).collect();
    let covering_radius = match &t.norm {
        Norm::Polyhedral(_) => (0..t.q)
            .map(|i| {
                let mut e = vec![0.0; t.q];
                e[i] = half[i];
                t.norm.eval(&e)
            })
            .sum::<f64>(),
        _ => t.norm.eval(&half),
    } / t.diameter;
    // every normalized torus distance is off by at most this factor
    let discretization_error = t.diameter_error / t.diameter;
    // X takes the values k/diam, the torus every value in [0, 1]
    let value_gap_term = 0.5 / diam / 2.0;
    let x_values: Vec<f64> = x.dist.iter().map(|&d| d as f64 / diam).collect();
    let res = moduli.iter().map(|&m| (4 * m).min(256) as usize).collect::<Vec<_>>();
    let total: usize = res.iter().product();
    let torus_values = (0..total).map(|mut idx| {
        let p: Vec<f64> = res
            .iter()
            .map(|&r| {
                let c = idx % r;
                idx /= r;
                c as f64 / r as f64
            })
            .collect();
        t.distance(&origin, &p).min(1.0)
    });
    let histogram_heuristic = histogram_gap(&histogram(x_values.into_iter()), &histogram(torus_values));
    check_order(GhBounds {
        upper: distortion / 2.0 + covering_radius + discretization_error,
        lower: value_gap_term,
        distortion,
        covering_radius,
        discretization_error,
        diameter_term: 0.0,
        value_gap_term,
        histogram_heuristic,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DirectionEstimate {
    pub direction: Vec<i64>,
    /// `d_S(0, kv)/k` per scale.
    pub estimates: Vec<Rat>,
    pub deltas: Vec<f64>,
    pub homogeneous: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityCheck {
    pub v: Vec<i64>,
    pub w: Vec<i64>,
    pub sum: Rat,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub dimension: usize,
    pub scales: Vec<u32>,
    pub directions: Vec<DirectionEstimate>,
    pub convexity: Vec<ConvexityCheck>,
    /// Generator ℓ¹ length bound `r` in the tolerance `10⁻⁶ + 2r/k`.
    pub r: u64,
    pub tolerance: f64,
    pub fitted: Norm,
    /// Largest gap between the fitted norm and the final-scale estimates.
    pub fit_deviation: f64,
    pub homogeneous: bool,
    pub convex: bool,
}

fn lattice_vec(e: &Element) -> Vec<i64> {
    match e {
        Element::Ints(v) => v.clone(),
        _ => unreachable!("free-abelian elements are integer vectors"),
    }
}

/// `‖v‖ ≈ d_S(0, kv)/k` over the given scales on `Z^d`.
pub fn norm_extract(s: &ElementSet, directions: &[Vec<i64>], scales: &[u32]) -> Result<NormReport> {
    let g = s.group();
    let GroupSpec::FreeAbelian { d } = *g.spec() else {
        return Err(Error::InvalidInput(
            "norm extraction runs on free-abelian groups".into(),
        ));
    };
    if !s.is_symmetric() {
        return Err(Error::Precondition("S must be symmetric".into()));
    }
    if scales.is_empty() || scales[0] == 0 || scales.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("scales must be positive and increasing".into()));
    }
    let gens: Vec<Vec<i64>> = s.iter().map(lattice_vec).collect();
    let r = gens
        .iter()
        .map(|v| v.iter().map(|x| x.unsigned_abs()).sum::<u64>())
        .max()
        .unwrap_or(0);
    let fitted =
        fit_norm(d, &gens).map_err(|_| Error::Precondition("S does not generate a full-rank lattice".into()))?;
    let kmax = *scales.last().unwrap();
    let tolerance = 1e-6 + 2.0 * r as f64 / kmax as f64;
    let zero = g.identity().clone();
    let dist = |v: &[i64], k: u32| -> Result<u32> {
        if v.len() != d {
            return Err(Error::InvalidInput(format!("direction {v:?} is not in Z^{d}")));
        }
        let target = Element::Ints(v.iter().map(|x| x * k as i64).collect());
        let l1: u64 = v.iter().map(|x| x.unsigned_abs()).sum::<u64>() * k as u64;
        // with S generating, every target is within a multiple of its ℓ¹ length
        let radius = (l1 as u32).saturating_mul(8).max(8);
        word_distance(g, s, &zero, &target, radius)?
            .ok_or_else(|| Error::Precondition(format!("direction {v:?} unreachable at scale {k}")))
    };
    let mut dirs = Vec::new();
    let mut fit_deviation = 0.0f64;
    let mut homogeneous = true;
    for v in directions {
        let estimates: Vec<Rat> = scales
            .iter()
            .map(|&k| Ok(Rat::new(dist(v, k)?, k)))
            .collect::<Result<_>>()?;
        let deltas: Vec<f64> = estimates
            .windows(2)
            .map(|w| (w[1].to_f64() - w[0].to_f64()).abs())
            .collect();
        let last = estimates.last().unwrap().to_f64();
        let ok = scales
            .iter()
            .zip(&estimates)
            .all(|(&k, e)| (e.to_f64() - last).abs() <= 1e-6 + 2.0 * r as f64 / k as f64);
        homogeneous &= ok;
        let vf: Vec<f64> = v.iter().map(|&x| x as f64).collect();
        fit_deviation = fit_deviation.max((fitted.eval(&vf) - last).abs());
        dirs.push(DirectionEstimate {
            direction: v.clone(),
            estimates,
            deltas,
            homogeneous: ok,
        });
    }
    let mut convexity = Vec::new();
    for (i, a) in dirs.iter().enumerate() {
        for b in &dirs[i..] {
            let sum_dir: Vec<i64> = a.direction.iter().zip(&b.direction).map(|(x, y)| x + y).collect();
            let sum = Rat::new(dist(&sum_dir, kmax)?, kmax);
            let bound = a.estimates.last().unwrap().to_f64() + b.estimates.last().unwrap().to_f64() + tolerance;
            convexity.push(ConvexityCheck {
                v: a.direction.clone(),
                w: b.direction.clone(),
                holds: sum.to_f64() <= bound,
                sum,
                bound,
            });
        }
    }
    let convex = convexity.iter().all(|c| c.holds);
    Ok(NormReport {
        dimension: d,
        scales: scales.to_vec(),
        directions: dirs,
        convexity,
        r,
        tolerance,
        fitted,
        fit_deviation,
        homogeneous,
        convex,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `cyclic(n)` with `S = {±1}`.
    Cycles,
    /// `cyclic(n)²` with `S = {±e₁, ±e₂}`.
    SquareGrid,
    /// Unitriangular `3×3` matrices over `Z/nZ` with `S = {X^{±1}, Y^{±1}}`.
    HeisenbergQuotient,
}

impl Family {
    pub fn group(&self, n: u64) -> GroupSpec {
        match self {
            Family::Cycles => GroupSpec::Cyclic { n },
            Family::SquareGrid => GroupSpec::DirectProduct {
                factors: vec![GroupSpec::Cyclic { n }; 2],
            },
            Family::HeisenbergQuotient => GroupSpec::heisenberg_mod(n),
        }
    }

    /// The lattice whose limit norm the family's torus carries.
    pub fn lattice_generators(&self) -> Vec<Vec<i64>> {
        match self {
            Family::Cycles => vec![vec![1], vec![-1]],
            _ => vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitRow {
    pub size: u64,
    pub points: usize,
    pub condition: ConditionReport,
    /// `N(1/4)`, `N(1/8)` and their ratio; absent above the metric cap.
    pub covering: Option<(usize, usize, f64)>,
    pub gh: GhBounds,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitReport {
    pub family: Family,
    pub torus: TorusModel,
    pub norm: NormReport,
    pub rows: Vec<LimitRow>,
    /// Upper bounds strictly decrease along the sizes.
    pub decreasing: bool,
}

pub const FIT_DIRECTIONS_2D: [[i64; 2]; 4] = [[1, 0], [0, 1], [1, 1], [2, 1]];
pub const FIT_SCALES: [u32; 3] = [4, 8, 16];

pub fn torus_limit_report(family: Family, sizes: &[u64], caps: &crate::Caps) -> Result<LimitReport> {
    let gens = family.lattice_generators();
    let q = gens[0].len();
    let lattice = Group::with_caps(GroupSpec::FreeAbelian { d: q }, caps.clone())?;
    let s = ElementSet::new(&lattice, gens.iter().map(|v| Element::Ints(v.clone())))?;
    let directions: Vec<Vec<i64>> = if q == 1 {
        vec![vec![1], vec![2]]
    } else {
        FIT_DIRECTIONS_2D.iter().map(|v| v.to_vec()).collect()
    };
    let norm = norm_extract(&s, &directions, &FIT_SCALES)?;
    let torus = TorusModel::new(q, norm.fitted.clone())?;
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let g = Group::with_caps(family.group(n), caps.clone())?;
        let x = CayleyGraph::standard(&g)?;
        let gh = gh_bounds_torus(&x, &torus)?;
        let covering = if x.len() <= caps.max_metric_points {
            let (space, _) = rescaled_space(&x)?;
            let a = covering_number(&space, &Rat::new(1, 4))?;
            let b = covering_number(&space, &Rat::new(1, 8))?;
            Some((a, b, b as f64 / a as f64))
        } else {
            None
        };
        rows.push(LimitRow {
            size: n,
            points: x.len(),
            condition: condition_values(&x),
            covering,
            gh,
        });
    }
    if family == Family::Cycles {
        for r in &rows {
            if r.gh.upper > 2.0 / r.size as f64 {
                return Err(Error::violation(
                    "cycle gh upper bound <= 2/n",
                    json!({"n": r.size, "upper": r.gh.upper}),
                ));
            }
        }
    }
    let decreasing = rows.windows(2).all(|w| w[1].gh.upper < w[0].gh.upper);
    Ok(LimitReport {
        family,
        torus,
        norm,
        rows,
        decreasing,
    })
}

#[cfg(test)]
mod tests;
