//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Every random draw is seeded.

use agtk::cayley::{linf_word_metric, spectral_gap, CayleyGraph};
use agtk::fixtures;
use agtk::group::ZInt;
use agtk::limits::{norm_extract, torus_limit_report, Family};
use agtk::progressions::{box_progression, free_group_bounds, growth_profile};
use agtk::set::Powers;
use agtk::setcalc::{approx_constant, covers, lemma210_witness, lemma211_witness, ruzsa_cover, triangle_slack};
use agtk::verify::{run_battery, Battery, SweepOptions};
use agtk::{Caps, Element, ElementSet, Error, Group, GroupSpec, Rat};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{HashSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn group(spec: &str) -> Group {
    Group::new(GroupSpec::parse(spec).unwrap()).unwrap()
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + tag)
}

fn heis(x: i64, y: i64, z: i64) -> Element {
    Element::Heis(ZInt::Small(x), ZInt::Small(y), ZInt::Small(z))
}

/// Where random sets are drawn from: a finite group's element list, or a
/// coordinate window of the integer Heisenberg group.
enum Pool {
    Finite(Group, Vec<Element>),
    HeisWindow(Group, i64),
}

impl Pool {
    fn finite(spec: &str) -> Pool {
        let g = group(spec);
        let e = g.elements().unwrap();
        Pool::Finite(g, e)
    }

    fn heis_window(r: i64) -> Pool {
        Pool::HeisWindow(group("heisenberg"), r)
    }

    fn draw(&self, rng: &mut ChaCha8Rng, max: usize) -> ElementSet {
        let k = rng.gen_range(1..=max);
        match self {
            Pool::Finite(g, e) => ElementSet::new(g, e.choose_multiple(rng, k.min(e.len())).cloned()).unwrap(),
            Pool::HeisWindow(g, r) => {
                let mut v = Vec::new();
                for _ in 0..k {
                    v.push(heis(
                        rng.gen_range(-r..=*r),
                        rng.gen_range(-r..=*r),
                        rng.gen_range(-r..=*r),
                    ));
                }
                ElementSet::new(g, v).unwrap()
            }
        }
    }

    /// `A ∪ A⁻¹ ∪ {1}` for a random `A`.
    fn draw_symmetric(&self, rng: &mut ChaCha8Rng, max: usize) -> ElementSet {
        self.draw(rng, max).symmetrize()
    }
}

fn battery(b: Battery, samples: usize, limit: Option<Duration>) -> Outcome {
    let t = Instant::now();
    let opts = SweepOptions {
        max_order: 10,
        samples,
        seed: 1,
        caps: Caps::default(),
    };
    let r = run_battery(b, &opts).map_err(|e| e.to_string())?;
    let took = t.elapsed();
    let msg = format!(
        "{} instances, {} with hypothesis, {} skipped, {} violations, {:.1}s",
        r.instances,
        r.hypothesis,
        r.skipped,
        r.violations,
        took.as_secs_f64()
    );
    if r.violations > 0 {
        return Err(format!("{msg}; first witness {}", r.witness.unwrap_or_default()));
    }
    if limit.is_some_and(|l| took > l) {
        return Err(format!("{msg}; over the time limit"));
    }
    Ok(msg)
}

fn c1_unit_doubling() -> Outcome {
    battery(Battery::UnitDoubling, 0, Some(Duration::from_secs(120)))
}

fn c2_freiman() -> Outcome {
    battery(Battery::Freiman, 0, None)
}

fn c3_ruzsa_triangle() -> Outcome {
    let pools = [Pool::finite("cyclic:60"), Pool::finite("sym:5"), Pool::heis_window(3)];
    let mut rng = rng(3);
    let mut min = None::<Rat>;
    for i in 0..10_000 {
        let p = &pools[i % pools.len()];
        let (a, b, c) = (p.draw(&mut rng, 8), p.draw(&mut rng, 8), p.draw(&mut rng, 8));
        let s = triangle_slack(&a, &b, &c).map_err(|e| e.to_string())?;
        if s < Rat::one() {
            return Err(format!(
                "slack {s} < 1 for {} {} {}",
                a.to_json(),
                b.to_json(),
                c.to_json()
            ));
        }
        if min.as_ref().is_none_or(|m| s < *m) {
            min = Some(s);
        }
    }
    Ok(format!("10000 triples, least slack {}", min.unwrap()))
}

fn c4_small_tripling() -> Outcome {
    let pools = [Pool::finite("cyclic:60"), Pool::finite("sym:4"), Pool::heis_window(2)];
    let mut rng = rng(4);
    for i in 0..1000 {
        let a = pools[i % pools.len()].draw(&mut rng, 5);
        let mut pw = Powers::new(a.clone());
        let n1 = a.len();
        let t = Rat::new(pw.get(3).unwrap().len(), n1);
        for n in 4..=6 {
            let an = pw.get(n).unwrap().len();
            if Rat::int(an) > t.pow(n as i32 - 2) * Rat::int(n1) {
                return Err(format!("|A^{n}| = {an} exceeds the bound for {}", a.to_json()));
            }
        }
    }
    Ok("1000 sets, n = 4, 5, 6".into())
}

fn c5_covering() -> Outcome {
    let pools = [
        Pool::finite("cyclic:60"),
        Pool::finite("sym:4"),
        Pool::finite("heis-mod:5"),
        Pool::heis_window(2),
    ];
    let mut rng = rng(5);
    for i in 0..1000 {
        let p = &pools[i % pools.len()];
        let (a, b) = (p.draw(&mut rng, 10), p.draw(&mut rng, 6));
        let w = ruzsa_cover(&a, &b).map_err(|e| e.to_string())?;
        let ab = a.product(&b).unwrap();
        let bb = b.product(&b.inverse()).unwrap();
        if !covers(&a, &w.x, &bb) || w.x.len() * b.len() > ab.len() {
            return Err(format!("bad ruzsa cover for {} {}", a.to_json(), b.to_json()));
        }
    }
    for i in 0..1000 {
        let a = pools[i % pools.len()].draw_symmetric(&mut rng, 3);
        let w = lemma210_witness(&a).map_err(|e| e.to_string())?;
        let mut pw = Powers::new(a.clone());
        let (a2, a4, a5) = (pw.get(2).unwrap(), pw.get(4).unwrap(), pw.get(5).unwrap());
        if !covers(&a4, &w.witness.x, &a2) || w.witness.x.len() * a.len() > a5.len() {
            return Err(format!("bad (A^2)^2 cover for {}", a.to_json()));
        }
    }
    Ok("1000 ruzsa covers, 1000 fifth-power covers".into())
}

fn c6_intersections() -> Outcome {
    let pools = [
        Pool::finite("cyclic:60"),
        Pool::finite("sym:4"),
        Pool::finite("heis-mod:5"),
    ];
    let mut rng = rng(6);
    for i in 0..100 {
        let p = &pools[i % pools.len()];
        let a = p.draw_symmetric(&mut rng, 4);
        let b = p.draw_symmetric(&mut rng, 4);
        let xa = approx_constant(&a, false).map_err(|e| e.to_string())?.witness.x;
        let yb = approx_constant(&b, false).map_err(|e| e.to_string())?.witness.x;
        if !covers(&a.product(&a).unwrap(), &xa, &a) || !covers(&b.product(&b).unwrap(), &yb, &b) {
            return Err("approximate-group witness does not cover".into());
        }
        let w = lemma211_witness(&a, &xa, &b, &yb).map_err(|e| e.to_string())?;
        let inter = a.product(&a).unwrap().intersection(&b.product(&b).unwrap()).unwrap();
        let sq = inter.product(&inter).unwrap();
        let bound = (xa.len() as u128).pow(3) * (yb.len() as u128).pow(3);
        if !covers(&sq, &w.witness.x, &inter) || w.witness.x.len() as u128 > bound {
            return Err(format!("bad intersection cover for {} {}", a.to_json(), b.to_json()));
        }
    }
    Ok("100 pairs".into())
}

/// Every tuple in `choices^d`.
fn tuples<T: Clone>(choices: &[T], d: usize) -> Vec<Vec<T>> {
    (0..d).fold(vec![vec![]], |acc, _| {
        acc.into_iter()
            .flat_map(|t| {
                choices.iter().map(move |c| {
                    let mut t = t.clone();
                    t.push(c.clone());
                    t
                })
            })
            .collect()
    })
}

fn c7_boxes() -> Outcome {
    let mut targets: Vec<(Group, Vec<Vec<Element>>)> = Vec::new();
    for d in 1..=3 {
        let g = group(&format!("free-abelian:{d}"));
        let basis = (0..d)
            .map(|i| Element::Ints((0..d).map(|j| (i == j) as i64).collect()))
            .collect();
        targets.push((g, vec![basis]));
        let line = group("free-abelian:1");
        let images = tuples(&[1i64, 2, 3], d)
            .into_iter()
            .map(|t| t.into_iter().map(|x| Element::Ints(vec![x])).collect());
        targets.push((line, images.collect()));
        for n in [2i64, 5, 12, 30] {
            let g = group(&format!("cyclic:{n}"));
            let images = tuples(&[1i64, 2, 5], d)
                .into_iter()
                .map(|t| t.into_iter().map(|x| Element::Ints(vec![x % n])).collect());
            targets.push((g, images.collect()));
        }
    }
    let mut count = 0;
    for (g, image_sets) in &targets {
        for images in image_sets {
            for lengths in tuples(&[0u32, 1, 2, 3], images.len()) {
                let (_, r) = box_progression(g, images, &lengths).map_err(|e| e.to_string())?;
                if !r.holds || r.square_size as u128 > r.bound {
                    return Err(format!("|PP| = {} > {}", r.square_size, r.bound));
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} boxes"))
}

/// `|Sⁿ|` for `S = {1, X^{±1}, Y^{±1}}` by BFS over integer matrices.
fn heisenberg_matrix_balls(n_max: usize) -> Vec<usize> {
    type M = [[i64; 3]; 3];
    fn mul(a: &M, b: &M) -> M {
        let mut c = [[0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        c
    }
    let unit = |x: i64, y: i64| -> M { [[1, x, 0], [0, 1, y], [0, 0, 1]] };
    let steps = [unit(1, 0), unit(-1, 0), unit(0, 1), unit(0, -1)];
    let id = unit(0, 0);
    let mut seen: HashSet<M> = HashSet::from([id]);
    let mut frontier = VecDeque::from([id]);
    let mut sizes = Vec::new();
    for _ in 0..n_max {
        let mut next = VecDeque::new();
        for m in frontier {
            for s in &steps {
                let x = mul(&m, s);
                if seen.insert(x) {
                    next.push_back(x);
                }
            }
        }
        frontier = next;
        sizes.push(seen.len());
    }
    sizes
}

fn c8_heisenberg_growth() -> Outcome {
    let t = Instant::now();
    let s = fixtures::heisenberg_ball().unwrap();
    let p = growth_profile(&s, 16, (8, 16)).map_err(|e| e.to_string())?;
    let oracle = heisenberg_matrix_balls(10);
    for (row, want) in p.table.iter().zip(&oracle) {
        if row.size != *want {
            return Err(format!(
                "|S^{}| = {} but the matrix oracle gives {want}",
                row.n, row.size
            ));
        }
    }
    let slope = p.slope.ok_or("no slope")?;
    let took = t.elapsed();
    let msg = format!("slope {slope:.4} over [8, 16], {:.1}s", took.as_secs_f64());
    if !(3.6..=4.4).contains(&slope) || took > Duration::from_secs(300) {
        return Err(msg);
    }
    Ok(msg)
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> Element {
    let len = rng.gen_range(1..=max_len);
    let mut w: Vec<i8> = Vec::new();
    while w.len() < len {
        let l = *[-2i8, -1, 1, 2].choose(rng).unwrap();
        if w.last() != Some(&-l) {
            w.push(l);
        }
    }
    Element::Word(w)
}

fn c9_free_group() -> Outcome {
    let g = group("free:2");
    let mut rng = rng(9);
    let mut tested = 0;
    while tested < 100 {
        let k = rng.gen_range(2..=50);
        let a = ElementSet::new(&g, (0..k).map(|_| random_word(&mut rng, 4))).unwrap();
        for n in [3, 4] {
            match free_group_bounds(&a, n) {
                Ok(r) if r.holds => {}
                Ok(r) => {
                    return Err(format!(
                        "bound fails: |A| = {}, n = {n}, |A^n| >= {}",
                        r.size, r.power_size
                    ))
                }
                // a commuting draw has no content here; redraw
                Err(Error::Precondition(_)) => continue,
                Err(e) => return Err(e.to_string()),
            }
        }
        tested += 1;
    }
    let big = 10i8;
    let mut ext = vec![Element::Word(vec![1])];
    for i in -(big - 1)..big {
        ext.push(Element::Word(vec![
            if i < 0 { -2 } else { 2 };
            i.unsigned_abs() as usize
        ]));
    }
    let a = ElementSet::new(&g, ext).unwrap();
    let a3 = a.power(3).unwrap();
    let ratio = a3.len() as f64 / (a.len() * a.len()) as f64;
    let msg = format!(
        "100 random sets; extremal N = 10: |A| = {}, |A^3|/|A|^2 = {ratio:.4}",
        a.len()
    );
    if !(0.2..=5.0).contains(&ratio) {
        return Err(msg);
    }
    Ok(msg)
}

fn c10_linf_sandwich() -> Outcome {
    let g = group("free-abelian:2");
    let gens = [Element::Ints(vec![1, 0]), Element::Ints(vec![0, 1])];
    let mut count = 0;
    for x in -5i64..=5 {
        for y in -5i64..=5 {
            if x.abs() + y.abs() > 5 {
                continue;
            }
            let r = linf_word_metric(&g, &gens, &Element::Ints(vec![x, y]), 5).map_err(|e| e.to_string())?;
            // independent values: ℓ∞ and ℓ¹ of the coordinates
            let (linf, l1) = (x.abs().max(y.abs()) as u32, (x.abs() + y.abs()) as u32);
            if !r.holds || r.linf != linf || r.word != l1 || !(linf <= l1 && l1 <= 2 * linf) {
                return Err(format!("({x}, {y}): linf {} word {}", r.linf, r.word));
            }
            count += 1;
        }
    }
    Ok(format!("{count} elements"))
}

fn c11_spectral() -> Outcome {
    let mut checked = 0;
    let mut worst_cycle = 0.0f64;
    let mut graphs: Vec<String> = (2..=256).map(|n| format!("cyclic:{n}")).collect();
    graphs.extend(["psl2:3", "psl2:5", "psl2:7", "psl2:11", "sym:4", "sym:5"].map(String::from));
    for spec in &graphs {
        let g = group(spec);
        let x = CayleyGraph::standard(&g).map_err(|e| e.to_string())?;
        let r = spectral_gap(&x).map_err(|e| e.to_string())?;
        let diam = x.diameter() as f64;
        if r.lambda1 < 1.0 / (8.0 * diam * diam) - 1e-9 {
            return Err(format!("{spec}: lambda1 {} below 1/(8 diam^2)", r.lambda1));
        }
        if let Some(n) = spec.strip_prefix("cyclic:") {
            let n: f64 = n.parse().unwrap();
            let want = 1.0 - (2.0 * std::f64::consts::PI / n).cos();
            worst_cycle = worst_cycle.max((r.lambda1 - want).abs());
        }
        checked += 1;
    }
    if worst_cycle > 1e-8 {
        return Err(format!("cycle eigenvalue off by {worst_cycle:e}"));
    }
    Ok(format!("{checked} graphs, cycle error {worst_cycle:.2e}"))
}

fn c12_dense_generation() -> Outcome {
    // 60 groups times 3 densities times 10 draws each
    battery(Battery::DenseGeneration, 1800, None)
}

fn c13_scaling_limits() -> Outcome {
    let caps = Caps::default();
    let cycles = torus_limit_report(Family::Cycles, &[16, 64, 256], &caps).map_err(|e| e.to_string())?;
    for r in &cycles.rows {
        if r.gh.upper > 2.0 / r.size as f64 {
            return Err(format!("cycle {}: upper {} > 2/n", r.size, r.gh.upper));
        }
    }
    let grids = torus_limit_report(Family::SquareGrid, &[8, 16, 32, 64], &caps).map_err(|e| e.to_string())?;
    let uppers: Vec<f64> = grids.rows.iter().map(|r| r.gh.upper).collect();
    let decreasing = uppers.windows(2).all(|w| w[1] < w[0]);
    let msg = format!("grid upper bounds {uppers:.4?}");
    if !decreasing || *uppers.last().unwrap() > 0.1 {
        return Err(msg);
    }
    Ok(msg)
}

fn c14_norms() -> Outcome {
    let g = group("free-abelian:2");
    let lattice = |v: &[[i64; 2]]| ElementSet::new(&g, v.iter().map(|p| Element::Ints(p.to_vec()))).unwrap();
    let axis = lattice(&[[1, 0], [-1, 0], [0, 1], [0, -1]]);
    let king = lattice(&[[1, 0], [-1, 0], [0, 1], [0, -1], [1, 1], [1, -1], [-1, 1], [-1, -1]]);
    let dirs: Vec<Vec<i64>> = vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![2, 1], vec![1, -3], vec![-2, 5]];
    let scales = [1, 2, 4, 8, 16];
    for (name, s, norm) in [
        (
            "axis",
            &axis,
            (|v: &[i64]| v[0].abs() + v[1].abs()) as fn(&[i64]) -> i64,
        ),
        ("king", &king, |v: &[i64]| v[0].abs().max(v[1].abs())),
    ] {
        let r = norm_extract(s, &dirs, &scales).map_err(|e| e.to_string())?;
        for d in &r.directions {
            let want = Rat::int(norm(&d.direction));
            if d.estimates.iter().any(|e| *e != want) {
                return Err(format!(
                    "{name}: direction {:?} estimates {:?}",
                    d.direction, d.estimates
                ));
            }
        }
        if !r.convex {
            return Err(format!("{name}: convexity check failed"));
        }
    }
    Ok(format!("{} directions at scales {scales:?}", dirs.len()))
}

fn c15_fixtures() -> Outcome {
    let tmp = std::env::temp_dir().join(format!("agtk-acceptance-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&tmp);
    let out = Command::new(env!("CARGO_BIN_EXE_agtk"))
        .arg("--fixtures")
        .arg(&tmp)
        .arg("--refresh-fixtures")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("refresh failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    let frozen = fixtures::default_dir();
    let mut drift = Vec::new();
    for name in fixtures::NAMES {
        let file = format!("{name}.json");
        let a = std::fs::read(frozen.join(&file)).map_err(|e| format!("{file}: {e}"))?;
        let b = std::fs::read(tmp.join(&file)).map_err(|e| format!("{file}: {e}"))?;
        if a != b {
            drift.push(name);
        }
    }
    let _ = std::fs::remove_dir_all(&tmp);
    if !drift.is_empty() {
        return Err(format!("drift in {drift:?}"));
    }
    Ok(format!("{} fixtures regenerated byte-identical", fixtures::NAMES.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 15] = [
        ("unit doubling sweep", c1_unit_doubling),
        ("freiman 3/2 sweep", c2_freiman),
        ("ruzsa triangle", c3_ruzsa_triangle),
        ("small tripling", c4_small_tripling),
        ("ruzsa covering", c5_covering),
        ("intersection covering", c6_intersections),
        ("box progressions", c7_boxes),
        ("heisenberg growth", c8_heisenberg_growth),
        ("free group products", c9_free_group),
        ("word metric sandwich", c10_linf_sandwich),
        ("spectral gap", c11_spectral),
        ("dense generation", c12_dense_generation),
        ("scaling limits", c13_scaling_limits),
        ("norm extraction", c14_norms),
        ("frozen fixtures", c15_fixtures),
    ];
    let only: Option<usize> = std::env::var("AGTK_CRITERION").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
