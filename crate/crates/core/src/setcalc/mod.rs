//! Product-set calculus: doubling, Ruzsa distance, covering lemmas,
//! approximate-group constants and the escape norm.

mod cover;

pub use cover::{covers, exact_translate_cover, greedy_translate_cover, ruzsa_cover, CoverWitness};

use crate::error::{Error, Result};
use crate::group::{is_prime, Element};
use crate::rational::Rat;
use crate::set::{ElementSet, Powers};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;
use std::cmp::Ordering;

fn nonempty(a: &ElementSet, name: &str) -> Result<()> {
    if a.is_empty() {
        return Err(Error::InvalidInput(format!("{name} must be nonempty")));
    }
    Ok(())
}

fn big(n: usize) -> BigInt {
    BigInt::from(n)
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerRow {
    pub n: usize,
    pub size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PluenneckeRow {
    pub n: usize,
    pub size: usize,
    /// `K₊ⁿ|A|`.
    pub bound: Rat,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DoublingReport {
    pub size: usize,
    pub doubling: Rat,
    pub tripling: Rat,
    pub powers: Vec<PowerRow>,
    /// `|Aⁿ| ≤ (|A³|/|A|)^{n−2}|A|` for every tabulated `n ≥ 3`.
    pub small_tripling_holds: bool,
    /// Present for abelian ambient groups only.
    pub pluennecke: Option<Vec<PluenneckeRow>>,
}

/// Doubling and tripling constants and `|Aⁿ|` for `n ≤ n_max`.
pub fn doubling_report(a: &ElementSet, n_max: usize) -> Result<DoublingReport> {
    nonempty(a, "A")?;
    let mut pw = Powers::new(a.clone());
    let top = n_max.max(3);
    let sizes: Vec<usize> = (1..=top).map(|n| pw.get(n).map(|s| s.len())).collect::<Result<_>>()?;
    let s1 = sizes[0];
    let (s2, s3) = (sizes[1], sizes[2]);
    for n in 4..=top {
        // |Aⁿ|·|A|^{n−3} ≤ |A³|^{n−2}
        let lhs = big(sizes[n - 1]) * big(s1).pow((n - 3) as u32);
        let rhs = big(s3).pow((n - 2) as u32);
        if lhs > rhs {
            return Err(Error::violation(
                "small tripling |A^n| <= (|A^3|/|A|)^(n-2)|A|",
                json!({"n": n, "set": a.to_json(), "sizes": sizes}),
            ));
        }
    }
    let pluennecke = if a.group().is_abelian() {
        let mut rows = Vec::new();
        for n in 1..=top {
            let bound = Rat::new(big(s2).pow(n as u32), big(s1).pow(n as u32 - 1));
            let holds = Rat::int(sizes[n - 1]) <= bound;
            if !holds {
                return Err(Error::violation(
                    "Pluennecke |nA| <= K^n|A|",
                    json!({"n": n, "set": a.to_json(), "sizes": sizes}),
                ));
            }
            rows.push(PluenneckeRow {
                n,
                size: sizes[n - 1],
                bound,
                holds,
            });
        }
        Some(rows)
    } else {
        None
    };
    Ok(DoublingReport {
        size: s1,
        doubling: Rat::new(s2, s1),
        tripling: Rat::new(s3, s1),
        powers: sizes
            .iter()
            .enumerate()
            .take(n_max.max(1))
            .map(|(i, &size)| PowerRow { n: i + 1, size })
            .collect(),
        small_tripling_holds: true,
        pluennecke,
    })
}

/// `exp(2·d(A,B)) = |AB⁻¹|² / (|A||B|)`, kept as two exact integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RuzsaValue {
    pub numerator: u64,
    pub denominator: u64,
}

impl RuzsaValue {
    pub fn ratio(&self) -> Rat {
        Rat::new(self.numerator, self.denominator)
    }

    /// `d(A,B) = ½·log(numerator/denominator)`; informational only.
    pub fn distance(&self) -> f64 {
        0.5 * (self.numerator as f64 / self.denominator as f64).ln()
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == self.denominator
    }
}

impl PartialOrd for RuzsaValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RuzsaValue {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.numerator as u128 * other.denominator as u128).cmp(&(other.numerator as u128 * self.denominator as u128))
    }
}

pub fn ruzsa_distance(a: &ElementSet, b: &ElementSet) -> Result<RuzsaValue> {
    a.same_group(b)?;
    nonempty(a, "A")?;
    nonempty(b, "B")?;
    let ab = a.product(&b.inverse())?.len() as u64;
    let ba = b.product(&a.inverse())?.len() as u64;
    if ab != ba {
        return Err(Error::violation(
            "Ruzsa distance symmetry |AB^-1| = |BA^-1|",
            json!({"a": a.to_json(), "b": b.to_json()}),
        ));
    }
    let v = RuzsaValue {
        numerator: ab * ab,
        denominator: a.len() as u64 * b.len() as u64,
    };
    if v.numerator < v.denominator {
        return Err(Error::violation(
            "Ruzsa distance nonnegative",
            json!({"a": a.to_json(), "b": b.to_json()}),
        ));
    }
    Ok(v)
}

/// Squared triangle slack `(|AB⁻¹||BC⁻¹|)² / (|B||AC⁻¹|)²`; at least 1 by the
/// Ruzsa triangle inequality `|B||AC⁻¹| ≤ |AB⁻¹||BC⁻¹|`.
pub fn triangle_slack(a: &ElementSet, b: &ElementSet, c: &ElementSet) -> Result<Rat> {
    a.same_group(b)?;
    b.same_group(c)?;
    for (s, n) in [(a, "A"), (b, "B"), (c, "C")] {
        nonempty(s, n)?;
    }
    let ab = a.product(&b.inverse())?.len();
    let bc = b.product(&c.inverse())?.len();
    let ac = a.product(&c.inverse())?.len();
    let num = big(ab * bc).pow(2);
    let den = big(b.len() * ac).pow(2);
    if num < den {
        return Err(Error::violation(
            "Ruzsa triangle inequality |B||AC^-1| <= |AB^-1||BC^-1|",
            json!({"a": a.to_json(), "b": b.to_json(), "c": c.to_json()}),
        ));
    }
    Ok(Rat::new(num, den))
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxConstant {
    pub size: usize,
    pub square_size: usize,
    pub k_greedy: usize,
    pub witness: CoverWitness,
    pub k_exact: Option<usize>,
    pub exact_witness: Option<ElementSet>,
}

fn symmetric_with_identity(a: &ElementSet, name: &str) -> Result<()> {
    if !a.contains_identity() {
        return Err(Error::Precondition(format!("{name} does not contain the identity")));
    }
    if !a.is_symmetric() {
        return Err(Error::Precondition(format!("{name} is not symmetric")));
    }
    Ok(())
}

/// Greedy (and optionally exact) least `K` with `AA ⊆ XA`, `|X| = K`.
pub fn approx_constant(a: &ElementSet, exact: bool) -> Result<ApproxConstant> {
    symmetric_with_identity(a, "A")?;
    let aa = a.product(a)?;
    approx_constant_with_square(a, &aa, exact)
}

pub(crate) fn approx_constant_with_square(a: &ElementSet, aa: &ElementSet, exact: bool) -> Result<ApproxConstant> {
    let x = greedy_translate_cover(a, aa)?;
    if !covers(aa, &x, a) {
        return Err(Error::violation("greedy cover AA ⊆ XA", json!({"x": x.to_json()})));
    }
    let k_greedy = x.len();
    let (k_exact, exact_witness) = if exact {
        let (k, xe) = exact_translate_cover(a, aa, k_greedy)?;
        if k > k_greedy || !covers(aa, &xe, a) {
            return Err(Error::violation(
                "exact cover is valid and no larger than greedy",
                json!({"k_exact": k, "k_greedy": k_greedy}),
            ));
        }
        (Some(k), Some(xe))
    } else {
        (None, None)
    };
    Ok(ApproxConstant {
        size: a.len(),
        square_size: aa.len(),
        k_greedy,
        witness: CoverWitness::new("AA", "A", x),
        k_exact,
        exact_witness,
    })
}

/// Measured greedy constant of `(A ∪ A⁻¹ ∪ {1})²`.
pub fn symmetric_square_constant(a: &ElementSet) -> Result<ApproxConstant> {
    approx_constant(&a.symmetrize().power(2)?, false)
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma210 {
    pub size: usize,
    pub fifth_power_size: usize,
    /// `⌊|A⁵|/|A|⌋`.
    pub k: usize,
    pub witness: CoverWitness,
}

/// For symmetric `A ∋ 1`: `X` from the Ruzsa cover of `A⁴` by `A` satisfies
/// `(A²)² ⊆ X·A²` and `|X| ≤ |A⁵|/|A|`.
pub fn lemma210_witness(a: &ElementSet) -> Result<Lemma210> {
    symmetric_with_identity(a, "A")?;
    let mut pw = Powers::new(a.clone());
    let a2 = pw.get(2)?;
    let a4 = pw.get(4)?;
    let a5 = pw.get(5)?;
    let w = ruzsa_cover(&a4, a)?;
    if w.x.len() * a.len() > a5.len() {
        return Err(Error::violation(
            "|X| <= |A^5|/|A|",
            json!({"x": w.x.len(), "a5": a5.len(), "a": a.len()}),
        ));
    }
    if !covers(&a4, &w.x, &a2) {
        return Err(Error::violation("(A^2)^2 ⊆ X·A^2", json!({"x": w.x.to_json()})));
    }
    Ok(Lemma210 {
        size: a.len(),
        fifth_power_size: a5.len(),
        k: a5.len() / a.len(),
        witness: CoverWitness::new("(A^2)^2", "A^2", w.x),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma211 {
    pub intersection_size: usize,
    pub z_size: usize,
    /// `|X_A|³|Y_B|³`.
    pub z_bound: u128,
    pub witness: CoverWitness,
}

/// Given `AA ⊆ X_A·A` and `BB ⊆ Y_B·B`, builds `Z` of canonical-least
/// representatives of the nonempty `xA ∩ yB` with `x ∈ X_A³, y ∈ Y_B³`, and
/// checks `(A²∩B²)² ⊆ Z(A²∩B²)`.
pub fn lemma211_witness(a: &ElementSet, xa: &ElementSet, b: &ElementSet, yb: &ElementSet) -> Result<Lemma211> {
    a.same_group(xa)?;
    a.same_group(b)?;
    a.same_group(yb)?;
    symmetric_with_identity(a, "A")?;
    symmetric_with_identity(b, "B")?;
    let g = a.group();
    let a2 = a.product(a)?;
    let b2 = b.product(b)?;
    if !covers(&a2, xa, a) {
        return Err(Error::Precondition("AA is not contained in X_A·A".into()));
    }
    if !covers(&b2, yb, b) {
        return Err(Error::Precondition("BB is not contained in Y_B·B".into()));
    }
    let x3 = xa.power(3)?;
    let y3 = yb.power(3)?;
    let mut z = Vec::new();
    for x in x3.iter() {
        // xA in canonical order, so the first hit is the least element of xA ∩ yB
        let xa_set = a.left_translate(x);
        for y in y3.iter() {
            let yi = g.inv(y);
            if let Some(e) = xa_set.iter().find(|e| b.contains(&g.mul(&yi, e))) {
                z.push(e.clone());
            }
        }
    }
    let z = ElementSet::from_trusted(g, z);
    let inter = a2.intersection(&b2)?;
    let sq = inter.product(&inter)?;
    let z_bound = (xa.len() as u128).pow(3) * (yb.len() as u128).pow(3);
    if z.len() as u128 > z_bound {
        return Err(Error::violation("|Z| <= |X|^3|Y|^3", json!({"z": z.len()})));
    }
    if !covers(&sq, &z, &inter) {
        return Err(Error::violation(
            "(A^2 ∩ B^2)^2 ⊆ Z(A^2 ∩ B^2)",
            json!({"z": z.to_json()}),
        ));
    }
    Ok(Lemma211 {
        intersection_size: inter.len(),
        z_size: z.len(),
        z_bound,
        witness: CoverWitness::new("(A^2∩B^2)^2", "A^2∩B^2", z),
    })
}

/// `‖g‖_A = 1/n_A(g)` where `n_A(g)` is the largest `n` with
/// `1, g, …, gⁿ ∈ A`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EscapeNorm {
    /// `⟨g⟩ ⊆ A`.
    Zero,
    /// `1/n` with `n ≥ 1`.
    Finite { n: u64, value: Rat },
    /// `g ∉ A`, so `n_A(g) = 0`.
    Infinite,
}

impl EscapeNorm {
    pub fn to_f64(&self) -> f64 {
        match self {
            EscapeNorm::Zero => 0.0,
            EscapeNorm::Finite { n, .. } => 1.0 / *n as f64,
            EscapeNorm::Infinite => f64::INFINITY,
        }
    }
}

pub fn escape_norm(a: &ElementSet, g: &Element) -> Result<EscapeNorm> {
    let grp = a.group();
    grp.check(g)?;
    if !a.contains_identity() {
        return Err(Error::Precondition("escape norm needs the identity in A".into()));
    }
    let mut x = grp.identity().clone();
    // Powers stay in A for |A|+1 steps only if they cycle back to 1.
    for n in 0..=a.len() as u64 {
        x = grp.mul(&x, g);
        if &x == grp.identity() {
            return Ok(EscapeNorm::Zero);
        }
        if !a.contains(&x) {
            return Ok(if n == 0 {
                EscapeNorm::Infinite
            } else {
                EscapeNorm::Finite {
                    n,
                    value: Rat::new(1, n),
                }
            });
        }
    }
    Err(Error::violation(
        "powers of g inside a finite A must cycle",
        json!({"g": grp.to_json(g)}),
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct EscapeProfile {
    pub pairs: usize,
    /// Largest `‖gh‖_A / (‖g‖_A + ‖h‖_A)` over pairs with finite nonzero
    /// denominator and finite numerator.
    pub max_ratio: Option<f64>,
}

/// Measured triangle-type ratio of the escape norm over all pairs in `A`.
pub fn escape_profile(a: &ElementSet) -> Result<EscapeProfile> {
    const MAX: usize = 256;
    if a.len() > MAX {
        return Err(Error::cap("escape profile set size", MAX));
    }
    let g = a.group();
    let norms: Vec<f64> = a
        .iter()
        .map(|x| escape_norm(a, x).map(|e| e.to_f64()))
        .collect::<Result<_>>()?;
    let mut best: Option<f64> = None;
    let mut pairs = 0;
    for (i, x) in a.iter().enumerate() {
        for (j, y) in a.iter().enumerate() {
            let den = norms[i] + norms[j];
            if !(den.is_finite() && den > 0.0) {
                continue;
            }
            let num = escape_norm(a, &g.mul(x, y))?.to_f64();
            if num.is_finite() {
                pairs += 1;
                let r = num / den;
                best = Some(best.map_or(r, |b: f64| b.max(r)));
            }
        }
    }
    Ok(EscapeProfile { pairs, max_ratio: best })
}

#[derive(Clone, Debug, Serialize)]
pub struct SumProductMinimizer {
    pub k: usize,
    /// Least `max(|A+A|, |A·A|)` over all `k`-subsets.
    pub min_max_growth: usize,
    /// Lexicographically first minimizing subset.
    pub subset: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SumProductReport {
    pub p: u64,
    pub size: usize,
    pub sumset: usize,
    pub productset: usize,
    /// `log max(|A+A|, |A·A|) / log |A|`; absent when `|A| = 1`.
    pub exponent: Option<f64>,
    pub minimizer: Option<SumProductMinimizer>,
}

fn sum_prod_sizes(p: u64, a: &[u64]) -> (usize, usize) {
    let mut s = vec![false; p as usize];
    let mut m = vec![false; p as usize];
    for &x in a {
        for &y in a {
            s[((x + y) % p) as usize] = true;
            m[((x * y) % p) as usize] = true;
        }
    }
    (s.iter().filter(|&&b| b).count(), m.iter().filter(|&&b| b).count())
}

/// Sizes of `A+A` and `A·A` in the prime field `F_p`.
pub fn sumproduct_stats(p: u64, residues: &[u64], minimize_k: Option<usize>) -> Result<SumProductReport> {
    if !is_prime(p) || p > 101 {
        return Err(Error::spec("p", format!("{p} is not a prime at most 101")));
    }
    if let Some(&r) = residues.iter().find(|&&r| r >= p) {
        return Err(Error::InvalidInput(format!("residue {r} is not in [0, {p})")));
    }
    let mut a: Vec<u64> = residues.to_vec();
    a.sort_unstable();
    a.dedup();
    if a.is_empty() {
        return Err(Error::InvalidInput("A must be nonempty".into()));
    }
    let (sumset, productset) = sum_prod_sizes(p, &a);
    let exponent = (a.len() > 1).then(|| (sumset.max(productset) as f64).ln() / (a.len() as f64).ln());
    let minimizer = match minimize_k {
        None => None,
        Some(k) => {
            if p > 13 {
                return Err(Error::cap("exhaustive sum-product minimizer prime", 13u32));
            }
            if k == 0 || k as u64 > p {
                return Err(Error::InvalidInput(format!("subset size {k} is not in [1, {p}]")));
            }
            let mut best: Option<(usize, Vec<u64>)> = None;
            for mask in 0u32..(1 << p) {
                if mask.count_ones() as usize != k {
                    continue;
                }
                let sub: Vec<u64> = (0..p).filter(|i| mask >> i & 1 == 1).collect();
                let (s, m) = sum_prod_sizes(p, &sub);
                let v = s.max(m);
                let better = match &best {
                    None => true,
                    Some((bv, bs)) => v < *bv || (v == *bv && sub < *bs),
                };
                if better {
                    best = Some((v, sub));
                }
            }
            let (min_max_growth, subset) = best.unwrap();
            Some(SumProductMinimizer {
                k,
                min_max_growth,
                subset,
            })
        }
    };
    Ok(SumProductReport {
        p,
        size: a.len(),
        sumset,
        productset,
        exponent,
        minimizer,
    })
}

#[cfg(test)]
mod tests;
