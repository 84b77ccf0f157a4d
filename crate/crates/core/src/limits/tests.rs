use super::*;
use crate::Caps;

fn cycle(n: u64) -> CayleyGraph {
    let g = Group::new(GroupSpec::Cyclic { n }).unwrap();
    CayleyGraph::standard(&g).unwrap()
}

fn grid(n: u64) -> CayleyGraph {
    let g = Group::new(Family::SquareGrid.group(n)).unwrap();
    CayleyGraph::standard(&g).unwrap()
}

#[test]
fn rescaled_cycle_and_grid() {
    let (x, _) = rescaled_space(&cycle(8)).unwrap();
    assert_eq!(x.len(), 8);
    assert_eq!(x.diameter(), 1.0);
    assert_eq!(x.exact(0, 1).unwrap(), Rat::new(1, 4));
    assert_eq!(x.exact(1, 6).unwrap(), Rat::new(3, 4));

    let (y, cond) = rescaled_space(&grid(8)).unwrap();
    assert_eq!(y.diameter(), 1.0);
    assert_eq!(cond.size_over_degree, Rat::int(16));
    assert_eq!(cond.diameter, 8);
    assert_eq!(cond.constants[1].c, Rat::new(1, 4));
}

#[test]
fn metric_axioms_rejected() {
    let labels = vec!["a".to_string(), "b".into(), "c".into()];
    // d(a,c) = 3 > d(a,b) + d(b,c) = 2
    let bad = vec![0, 1, 3, 1, 0, 1, 3, 1, 0];
    assert!(matches!(
        FiniteMetricSpace::rational(labels.clone(), bad, 3),
        Err(Error::Violation { .. })
    ));
    let asym = vec![0.0, 1.0, 1.0, 0.5, 0.0, 1.0, 1.0, 1.0, 0.0];
    assert!(FiniteMetricSpace::float(labels, asym).is_err());
}

/// Least number of radius-`k` arcs covering `Z/n` (arcs hold `2k+1` points).
fn arc_cover(n: u64, k: u64) -> usize {
    n.div_ceil(2 * k + 1) as usize
}

#[test]
fn covering_numbers() {
    let (x, _) = rescaled_space(&cycle(64)).unwrap();
    assert_eq!(covering_number(&x, &Rat::one()).unwrap(), 1);
    assert_eq!(covering_number(&x, &Rat::int(3)).unwrap(), 1);
    let quarter = covering_number(&x, &Rat::new(1, 4)).unwrap();
    assert!(quarter <= 4 && quarter >= arc_cover(64, 8));
    assert_eq!(covering_number(&x, &Rat::new(1, 1000)).unwrap(), 64);
    let mut prev = usize::MAX;
    for k in 1..=40 {
        let c = covering_number(&x, &Rat::new(k, 40)).unwrap();
        assert!(c <= prev);
        prev = c;
    }
    assert!(covering_number(&x, &Rat::zero()).is_err());
    let rows = covering_profile(&x, &[Rat::new(1, 8)]).unwrap();
    assert_eq!(
        rows[0].count as f64 / rows[0].ratio,
        covering_number(&x, &Rat::new(1, 4)).unwrap() as f64
    );
}

#[test]
fn gh_identical_spaces() {
    let (x, _) = rescaled_space(&cycle(10)).unwrap();
    let b = gh_bounds_spaces(&x, &x, &Correspondence::identity(x.len())).unwrap();
    assert_eq!((b.upper, b.lower), (0.0, 0.0));
    let partial = Correspondence { pairs: vec![(0, 0)] };
    assert!(gh_bounds_spaces(&x, &x, &partial).is_err());
}

#[test]
fn gh_cycles_to_circle() {
    let circle = TorusModel::new(1, Norm::L1).unwrap();
    for n in [16u64, 64, 256, 15] {
        let b = gh_bounds_torus(&cycle(n), &circle).unwrap();
        assert!(b.upper <= 2.0 / n as f64, "n = {n}: {}", b.upper);
        assert!(b.lower <= b.upper);
    }
}

#[test]
fn gh_grids_to_l1_torus() {
    let t = TorusModel::new(2, Norm::L1).unwrap();
    let ups: Vec<f64> = [8u64, 16, 32, 64]
        .iter()
        .map(|&n| gh_bounds_torus(&grid(n), &t).unwrap().upper)
        .collect();
    assert!(ups.windows(2).all(|w| w[1] < w[0]), "{ups:?}");
    assert!(ups[3] <= 0.1);
    let g = Group::new(GroupSpec::symmetric(3)).unwrap();
    assert!(gh_bounds_torus(&CayleyGraph::standard(&g).unwrap(), &t).is_err());
}

#[test]
fn torus_models() {
    assert_eq!(TorusModel::new(2, Norm::L1).unwrap().diameter, 1.0);
    let poly = TorusModel::new(2, Norm::Polyhedral(vec![vec![1.0, 1.0], vec![1.0, -1.0]])).unwrap();
    assert!((poly.diameter - 1.0).abs() <= poly.diameter_error + 1e-12);
    assert!(TorusModel::new(2, Norm::Polyhedral(vec![vec![1.0, 0.0]])).is_err());
    let t = TorusModel::from_json(&serde_json::json!({"q": 2, "norm": "linf"})).unwrap();
    assert!((t.distance(&[0.1, 0.9], &[0.9, 0.1]) - 0.4).abs() < 1e-12);
    assert!(TorusModel::from_json(&serde_json::json!({"q": 2, "norm": "l3"})).is_err());
}

#[test]
fn fitted_norms() {
    let axis = vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]];
    assert_eq!(fit_norm(2, &axis).unwrap(), Norm::L1);
    let king: Vec<Vec<i64>> = (-1..=1).flat_map(|a| (-1..=1).map(move |b| vec![a, b])).collect();
    assert_eq!(fit_norm(2, &king).unwrap(), Norm::Linf);
    let hex = vec![
        vec![1, 0],
        vec![-1, 0],
        vec![0, 1],
        vec![0, -1],
        vec![1, 1],
        vec![-1, -1],
    ];
    let n = fit_norm(2, &hex).unwrap();
    assert!(matches!(n, Norm::Polyhedral(_)));
    assert!((n.eval(&[1.0, 1.0]) - 1.0).abs() < 1e-12);
    assert!((n.eval(&[1.0, -1.0]) - 2.0).abs() < 1e-12);
}

fn lattice_set(gens: &[Vec<i64>]) -> ElementSet {
    let z2 = Group::new(GroupSpec::FreeAbelian { d: 2 }).unwrap();
    ElementSet::new(&z2, gens.iter().map(|v| Element::Ints(v.clone()))).unwrap()
}

#[test]
fn norm_extraction() {
    let dirs: Vec<Vec<i64>> = vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![3, -2], vec![0, 0]];
    let axis = lattice_set(&[vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]]);
    let r = norm_extract(&axis, &dirs, &[1, 2, 5, 10]).unwrap();
    for d in &r.directions {
        let l1 = d.direction.iter().map(|x| x.abs()).sum::<i64>();
        assert!(d.estimates.iter().all(|e| *e == Rat::int(l1)), "{:?}", d);
    }
    assert!(r.homogeneous && r.convex && r.fit_deviation == 0.0);

    let king: Vec<Vec<i64>> = (-1..=1)
        .flat_map(|a| (-1..=1).map(move |b| vec![a, b]))
        .filter(|v| v != &vec![0, 0])
        .collect();
    let r = norm_extract(&lattice_set(&king), &dirs, &[1, 2, 5, 10]).unwrap();
    for d in &r.directions {
        let linf = d.direction.iter().map(|x| x.abs()).max().unwrap();
        assert!(d.estimates.iter().all(|e| *e == Rat::int(linf)));
    }
    assert_eq!(r.fitted, Norm::Linf);
    assert!(norm_extract(&axis, &dirs, &[2, 1]).is_err());
}

#[test]
fn limit_reports() {
    let caps = Caps::default();
    let r = torus_limit_report(Family::SquareGrid, &[8, 16, 32, 64], &caps).unwrap();
    assert_eq!(r.rows.len(), 4);
    assert!(r.decreasing);
    assert!(r.rows[3].gh.upper <= 0.1);
    let r = torus_limit_report(Family::Cycles, &[16, 64, 256], &caps).unwrap();
    assert!(r.rows.iter().all(|row| row.gh.upper <= 2.0 / row.size as f64));
    assert!(torus_limit_report(Family::Cycles, &[], &caps).unwrap().rows.is_empty());
    let r = torus_limit_report(Family::HeisenbergQuotient, &[4, 6, 8], &caps).unwrap();
    assert_eq!(
        r.rows.iter().map(|row| row.points).collect::<Vec<_>>(),
        vec![64, 216, 512]
    );
}
