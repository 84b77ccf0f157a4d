//! Seeded sweeps that check the structural detectors over whole families of
//! small groups.

use crate::error::{Error, Result};
use crate::group::{Element, Group, GroupSpec};
use crate::rational::Rat;
use crate::set::{subgroup_closure, ElementSet};
use crate::structure::{
    dense_generation, detect_small_doubling, detect_unit_doubling, hamidoune_cover, schreier_index,
    strong_approx_check, Table,
};
use crate::Caps;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Battery {
    UnitDoubling,
    Freiman,
    Hamidoune,
    Schreier,
    DenseGeneration,
    StrongApprox,
}

impl Battery {
    pub const ALL: [Battery; 6] = [
        Battery::UnitDoubling,
        Battery::Freiman,
        Battery::Hamidoune,
        Battery::Schreier,
        Battery::DenseGeneration,
        Battery::StrongApprox,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Battery::UnitDoubling => "unit-doubling",
            Battery::Freiman => "freiman",
            Battery::Hamidoune => "hamidoune",
            Battery::Schreier => "schreier",
            Battery::DenseGeneration => "dense-generation",
            Battery::StrongApprox => "strong-approx",
        }
    }
}

impl FromStr for Battery {
    type Err = Error;
    fn from_str(s: &str) -> Result<Battery> {
        Battery::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown battery `{s}`")))
    }
}

/// A named member of a sweep family.
#[derive(Clone, Debug, Serialize)]
pub struct Member {
    pub label: String,
    pub spec: GroupSpec,
}

fn member(label: impl Into<String>, spec: GroupSpec) -> Member {
    Member {
        label: label.into(),
        spec,
    }
}

/// `cyclic(1..=max_order)` together with S₃, D₄ and Q₈ when they fit.
pub fn small_family(max_order: u64) -> Vec<Member> {
    let mut out: Vec<Member> = (1..=max_order)
        .map(|n| member(format!("cyclic:{n}"), GroupSpec::Cyclic { n }))
        .collect();
    if max_order >= 6 {
        out.push(member("S3", GroupSpec::symmetric(3)));
    }
    if max_order >= 8 {
        out.push(member("D4", GroupSpec::dihedral(4)));
        out.push(member("Q8", GroupSpec::quaternion()));
    }
    out
}

/// Largest group order swept over all subsets.
pub const MAX_EXHAUSTIVE_ORDER: u64 = 16;

#[derive(Clone, Debug, Default, Serialize)]
pub struct Tally {
    pub label: String,
    pub instances: usize,
    /// Instances where the hypothesis of the checked statement held.
    pub hypothesis: usize,
    /// Instances where the detector returned a structure.
    pub detected: usize,
    pub skipped: usize,
    pub violations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatteryReport {
    pub battery: Battery,
    pub seed: u64,
    pub instances: usize,
    pub hypothesis: usize,
    pub detected: usize,
    pub skipped: usize,
    pub violations: usize,
    pub groups: Vec<Tally>,
    /// First counterexample found, if any.
    pub witness: Option<serde_json::Value>,
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub max_order: u64,
    pub samples: usize,
    pub seed: u64,
    pub caps: Caps,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            max_order: 10,
            samples: 1000,
            seed: 0,
            caps: Caps::default(),
        }
    }
}

/// Outcome of one instance.
enum Check {
    Pass { hypothesis: bool, detected: bool },
    Skip,
    Fail(serde_json::Value),
}

struct Sweep {
    battery: Battery,
    seed: u64,
    groups: Vec<Tally>,
    witness: Option<serde_json::Value>,
}

impl Sweep {
    fn new(battery: Battery, seed: u64) -> Self {
        Sweep {
            battery,
            seed,
            groups: Vec::new(),
            witness: None,
        }
    }

    fn tally(&mut self, label: &str) -> &mut Tally {
        if self.groups.last().map(|t| t.label.as_str()) != Some(label) {
            self.groups.push(Tally {
                label: label.to_string(),
                ..Tally::default()
            });
        }
        self.groups.last_mut().unwrap()
    }

    /// Violations raised inside an op count as failures; other errors abort.
    fn record(&mut self, label: &str, outcome: Result<Check>) -> Result<()> {
        let outcome = match outcome {
            Err(Error::Violation { property, witness }) => {
                Check::Fail(json!({"property": property, "witness": witness}))
            }
            Err(e) => return Err(e),
            Ok(c) => c,
        };
        let t = self.tally(label);
        t.instances += 1;
        let mut first_witness = None;
        match outcome {
            Check::Pass { hypothesis, detected } => {
                t.hypothesis += hypothesis as usize;
                t.detected += detected as usize;
            }
            Check::Skip => t.skipped += 1,
            Check::Fail(w) => {
                t.violations += 1;
                first_witness = Some(json!({"group": label, "detail": w}));
            }
        }
        if self.witness.is_none() {
            self.witness = first_witness;
        }
        Ok(())
    }

    fn finish(self) -> BatteryReport {
        let sum = |f: fn(&Tally) -> usize| self.groups.iter().map(f).sum();
        BatteryReport {
            battery: self.battery,
            seed: self.seed,
            instances: sum(|t| t.instances),
            hypothesis: sum(|t| t.hypothesis),
            detected: sum(|t| t.detected),
            skipped: sum(|t| t.skipped),
            violations: sum(|t| t.violations),
            groups: self.groups,
            witness: self.witness,
        }
    }
}

/// Every nonempty subset of a small group, as bit masks over the sorted
/// element list.
fn subsets(g: &Group) -> Result<(Vec<Element>, u64)> {
    let elems = g.elements()?;
    if elems.len() as u64 > MAX_EXHAUSTIVE_ORDER {
        return Err(Error::cap("exhaustive subset sweep group order", MAX_EXHAUSTIVE_ORDER));
    }
    let count = 1u64 << elems.len();
    Ok((elems, count))
}

fn subset(g: &Group, elems: &[Element], mask: u64) -> ElementSet {
    ElementSet::new(
        g,
        elems
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| e.clone()),
    )
    .expect("group elements are canonical")
}

fn exhaustive(battery: Battery, opts: &SweepOptions, check: impl Fn(&ElementSet) -> Result<Check>) -> Result<Sweep> {
    let mut sweep = Sweep::new(battery, opts.seed);
    for m in small_family(opts.max_order) {
        let g = Group::with_caps(m.spec.clone(), opts.caps.clone())?;
        let (elems, count) = subsets(&g)?;
        for mask in 1..count {
            let a = subset(&g, &elems, mask);
            sweep.record(&m.label, check(&a))?;
        }
    }
    Ok(sweep)
}

fn unit_doubling_check(a: &ElementSet) -> Result<Check> {
    let aa = a.product(a)?;
    let hypothesis = aa.len() == a.len();
    let found = detect_unit_doubling(a)?;
    let ok = match &found {
        Some(s) => hypothesis && s.left_coset && s.right_coset && s.normalized,
        None => !hypothesis,
    };
    Ok(if ok {
        Check::Pass {
            hypothesis,
            detected: found.is_some(),
        }
    } else {
        Check::Fail(json!({"a": a.to_json(), "aa": aa.len()}))
    })
}

fn freiman_check(a: &ElementSet) -> Result<Check> {
    let aa = a.product(a)?;
    let hypothesis = 2 * aa.len() < 3 * a.len();
    let found = detect_small_doubling(a, &Rat::new(3, 2))?;
    let ok = match &found {
        Some(s) => hypothesis && s.contained && s.normalized && 2 * s.h_size < 3 * a.len(),
        None => !hypothesis,
    };
    Ok(if ok {
        Check::Pass {
            hypothesis,
            detected: found.is_some(),
        }
    } else {
        Check::Fail(json!({"a": a.to_json(), "aa": aa.len()}))
    })
}

fn hamidoune_check(a: &ElementSet) -> Result<Check> {
    let aa = a.product(a)?;
    if aa.len() >= 2 * a.len() {
        return Ok(Check::Pass {
            hypothesis: false,
            detected: false,
        });
    }
    Ok(match hamidoune_cover(a)? {
        Some(c) if c.h.len() <= a.len() && c.cosets <= c.bound => Check::Pass {
            hypothesis: true,
            detected: true,
        },
        _ => Check::Fail(json!({"a": a.to_json(), "aa": aa.len()})),
    })
}

/// Groups of order at most 512 for the randomized Hamidoune sweep.
pub fn hamidoune_random_family() -> Vec<Member> {
    vec![
        member("S4", GroupSpec::symmetric(4)),
        member("S5", GroupSpec::symmetric(5)),
        member("D12", GroupSpec::dihedral(12)),
        member("psl2:7", GroupSpec::Psl2 { p: 7 }),
        member("cyclic:512", GroupSpec::Cyclic { n: 512 }),
        member("heis-mod:5", GroupSpec::heisenberg_mod(5)),
    ]
}

/// Groups of order at most 120 for the randomized Schreier sweep.
pub fn schreier_family() -> Vec<Member> {
    vec![
        member("S3", GroupSpec::symmetric(3)),
        member("D4", GroupSpec::dihedral(4)),
        member("Q8", GroupSpec::quaternion()),
        member("S4", GroupSpec::symmetric(4)),
        member("D10", GroupSpec::dihedral(10)),
        member("cyclic:60", GroupSpec::Cyclic { n: 60 }),
        member("psl2:5", GroupSpec::Psl2 { p: 5 }),
        member("S5", GroupSpec::symmetric(5)),
    ]
}

fn pick(rng: &mut ChaCha8Rng, elems: &[Element]) -> Element {
    elems[rng.gen_range(0..elems.len())].clone()
}

/// A random subset of a random subgroup (more than half of it), sometimes
/// with one extra element, so that small doubling is common.
fn hamidoune_random(sweep: &mut Sweep, opts: &SweepOptions, rng: &mut ChaCha8Rng) -> Result<()> {
    let fam = hamidoune_random_family();
    for i in 0..opts.samples {
        let m = &fam[i % fam.len()];
        let g = Group::with_caps(m.spec.clone(), opts.caps.clone())?;
        let elems = g.elements()?;
        let gens: Vec<Element> = (0..rng.gen_range(1..=2)).map(|_| pick(rng, &elems)).collect();
        let h = subgroup_closure(&g, &ElementSet::new(&g, gens)?)?;
        let mut hv = h.to_vec();
        hv.shuffle(rng);
        let keep = h.len() / 2 + 1 + rng.gen_range(0..=(h.len() - h.len() / 2 - 1));
        hv.truncate(keep);
        if rng.gen_bool(0.5) {
            hv.push(pick(rng, &elems));
        }
        let a = ElementSet::new(&g, hv)?;
        let outcome = hamidoune_check(&a);
        sweep.record(&m.label, outcome)?;
    }
    Ok(())
}

fn schreier_random(opts: &SweepOptions, rng: &mut ChaCha8Rng) -> Result<Sweep> {
    let mut sweep = Sweep::new(Battery::Schreier, opts.seed);
    let fam = schreier_family();
    for i in 0..opts.samples {
        let m = &fam[i % fam.len()];
        let g = Group::with_caps(m.spec.clone(), opts.caps.clone())?;
        let elems = g.elements()?;
        let s = ElementSet::new(&g, (0..rng.gen_range(1..=3)).map(|_| pick(rng, &elems)))?;
        let span = subgroup_closure(&g, &s)?.to_vec();
        let h = if rng.gen_bool(0.2) {
            ElementSet::new(&g, span.clone())?
        } else {
            subgroup_closure(&g, &ElementSet::singleton(&g, pick(rng, &span)))?
        };
        let k = rng.gen_range(1..=4usize);
        let den = rng.gen_range(1..=3i64);
        let num = rng.gen_range(den..=k as i64 * den);
        let c = Rat::new(num, den);
        let outcome = schreier_index(&g, &s, &h, k, &c).map(|r| Check::Pass {
            hypothesis: r.hypothesis,
            detected: r.conclusion,
        });
        sweep.record(&m.label, outcome)?;
    }
    Ok(sweep)
}

pub const DENSE_ALPHAS: [(i64, i64); 3] = [(1, 2), (1, 4), (1, 8)];
pub const DENSE_MAX_N: u64 = 60;

/// Every `cyclic(n)`, `n ≤ 60`, with random symmetric `S ∋ 0` of density
/// at least `α` for each `α`.
fn dense_random(opts: &SweepOptions, rng: &mut ChaCha8Rng) -> Result<Sweep> {
    let mut sweep = Sweep::new(Battery::DenseGeneration, opts.seed);
    let per = (opts.samples / (DENSE_MAX_N as usize * DENSE_ALPHAS.len())).max(1);
    for n in 1..=DENSE_MAX_N {
        let g = Group::with_caps(GroupSpec::Cyclic { n }, opts.caps.clone())?;
        let label = format!("cyclic:{n}");
        for (p, q) in DENSE_ALPHAS {
            let alpha = Rat::new(p, q);
            let need = ((n as i64 * p + q - 1) / q) as usize;
            for _ in 0..per {
                let s = random_dense_symmetric(n, need, rng);
                let set = ElementSet::new(&g, s.into_iter().map(|x| Element::Ints(vec![x])))?;
                let outcome = match dense_generation(&g, &set, &alpha) {
                    Err(Error::Precondition(_)) => Ok(Check::Skip),
                    other => other.map(|r| Check::Pass {
                        hypothesis: true,
                        detected: r.holds,
                    }),
                };
                sweep.record(&label, outcome)?;
            }
        }
    }
    Ok(sweep)
}

fn random_dense_symmetric(n: u64, need: usize, rng: &mut ChaCha8Rng) -> Vec<i64> {
    let n = n as i64;
    let mut s = std::collections::BTreeSet::from([0i64]);
    while s.len() < need.max(1) {
        let x = rng.gen_range(0..n);
        s.insert(x);
        s.insert((n - x) % n);
    }
    s.into_iter().collect()
}

/// Every subgroup `H` of every family member, with `S = H`, `K = 1`.
fn strong_approx_sweep(opts: &SweepOptions) -> Result<Sweep> {
    let mut sweep = Sweep::new(Battery::StrongApprox, opts.seed);
    for m in small_family(opts.max_order) {
        let g = Group::with_caps(m.spec.clone(), opts.caps.clone())?;
        let whole = ElementSet::whole(&g)?;
        let table = Table::new(&whole)?;
        for h in table.subgroups_up_to(whole.len()) {
            let h = ElementSet::new(&g, h.iter().map(|&i| whole.get(i as usize).unwrap().clone()))?;
            let outcome = strong_approx_check(&h, &h, &Rat::one()).map(|r| {
                if r.strong {
                    Check::Pass {
                        hypothesis: true,
                        detected: true,
                    }
                } else {
                    Check::Fail(json!({"h": h.to_json(), "report": r}))
                }
            });
            sweep.record(&m.label, outcome)?;
        }
    }
    Ok(sweep)
}

pub fn run_battery(battery: Battery, opts: &SweepOptions) -> Result<BatteryReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let sweep = match battery {
        Battery::UnitDoubling => exhaustive(battery, opts, unit_doubling_check)?,
        Battery::Freiman => exhaustive(battery, opts, freiman_check)?,
        Battery::Hamidoune => {
            let mut s = exhaustive(battery, opts, hamidoune_check)?;
            hamidoune_random(&mut s, opts, &mut rng)?;
            s
        }
        Battery::Schreier => schreier_random(opts, &mut rng)?,
        Battery::DenseGeneration => dense_random(opts, &mut rng)?,
        Battery::StrongApprox => strong_approx_sweep(opts)?,
    };
    Ok(sweep.finish())
}
