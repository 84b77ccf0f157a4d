use super::*;
use crate::set::Powers;
use crate::Caps;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cyclic(n: u64) -> Group {
    Group::new(GroupSpec::Cyclic { n }).unwrap()
}

fn ints(g: &Group, v: impl IntoIterator<Item = i64>) -> ElementSet {
    ElementSet::new(g, v.into_iter().map(|x| Element::Ints(vec![x]))).unwrap()
}

#[test]
fn cyclic_diameters() {
    for n in 2..=20u64 {
        let g = cyclic(n);
        let x = CayleyGraph::new(&g, &ints(&g, [1, n as i64 - 1])).unwrap();
        assert_eq!(x.diameter(), n as u32 / 2);
        let all = CayleyGraph::new(&g, &ElementSet::whole(&g).unwrap()).unwrap();
        assert_eq!(all.diameter(), 1);
    }
    let g = cyclic(12);
    assert!(CayleyGraph::new(&g, &ints(&g, [3, 9])).is_err());
    assert!(CayleyGraph::build(&g, &ints(&g, [1])).is_err());
}

/// PSL₂(p) as sign-normalized integer quadruples, explored by plain BFS.
fn psl2_oracle(p: i64) -> (usize, u32) {
    let norm = |m: [i64; 4]| {
        let m = m.map(|x| x.rem_euclid(p));
        let neg = m.map(|x| (p - x) % p);
        m.min(neg)
    };
    let mul = |a: [i64; 4], b: [i64; 4]| {
        norm([
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ])
    };
    let gens = [[1, 1, 0, 1], [1, p - 1, 0, 1], [1, 0, 1, 1], [1, 0, p - 1, 1]].map(norm);
    let mut seen = std::collections::HashMap::from([(norm([1, 0, 0, 1]), 0u32)]);
    let mut q = VecDeque::from([norm([1, 0, 0, 1])]);
    let mut diam = 0;
    while let Some(x) = q.pop_front() {
        let d = seen[&x];
        diam = diam.max(d);
        for g in gens {
            let y = mul(x, g);
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(y) {
                e.insert(d + 1);
                q.push_back(y);
            }
        }
    }
    (seen.len(), diam)
}

#[test]
fn psl2_diameters_match_oracle() {
    for p in [3u64, 5, 7, 11] {
        let g = Group::new(GroupSpec::Psl2 { p }).unwrap();
        let x = CayleyGraph::standard(&g).unwrap();
        assert_eq!((x.len(), x.diameter()), psl2_oracle(p as i64), "p = {p}");
    }
}

#[test]
fn balls_match_powers() {
    for spec in [
        GroupSpec::symmetric(4),
        GroupSpec::Psl2 { p: 5 },
        GroupSpec::Cyclic { n: 30 },
    ] {
        let g = Group::new(spec).unwrap();
        let gens = ElementSet::new(&g, g.standard_generators()).unwrap();
        let s = gens.symmetrize();
        let x = CayleyGraph::new(&g, &s).unwrap();
        let r = ball_diameter(&x).unwrap();
        let mut pw = Powers::new(s.clone());
        for row in r.balls.iter().skip(1) {
            assert_eq!(pw.get(row.n as usize).unwrap().len(), row.ball);
        }
        assert_eq!(r.balls.last().unwrap().ball, x.len());
    }
}

#[test]
fn word_metric_axioms() {
    let g = Group::new(GroupSpec::symmetric(5)).unwrap();
    let x = CayleyGraph::standard(&g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pick = |rng: &mut ChaCha8Rng| x.vertices[rng.gen_range(0..x.len())].clone();
    for _ in 0..1000 {
        let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let ab = x.distance(&a, &b).unwrap();
        assert_eq!(ab, x.distance(&b, &a).unwrap());
        assert!(x.distance(&a, &c).unwrap() <= ab + x.distance(&b, &c).unwrap());
        assert_eq!(ab == 0, a == b);
    }
    let a = pick(&mut rng);
    let b = pick(&mut rng);
    let bidir = word_distance(&g, &x.s, &a, &b, 100).unwrap();
    assert_eq!(bidir, x.distance(&a, &b));
    let row = x.distances_from(x.index_of(&a).unwrap());
    assert_eq!(row[x.index_of(&b).unwrap()], x.distance(&a, &b).unwrap());
}

#[test]
fn linf_examples() {
    let z2 = Group::new(GroupSpec::FreeAbelian { d: 2 }).unwrap();
    let gens = [Element::Ints(vec![1, 0]), Element::Ints(vec![0, 1])];
    let r = linf_word_metric(&z2, &gens, &Element::Ints(vec![3, 2]), 50).unwrap();
    assert_eq!((r.linf, r.word), (3, 5));
    let r = linf_word_metric(&z2, &gens, &Element::Ints(vec![0, 0]), 50).unwrap();
    assert_eq!((r.linf, r.word), (0, 0));
    let c10 = cyclic(10);
    let r = linf_word_metric(&c10, &[Element::Ints(vec![1])], &Element::Ints(vec![5]), 50).unwrap();
    assert_eq!((r.linf, r.word), (5, 5));
}

#[test]
fn spectral_closed_forms() {
    for n in [3u64, 4, 10, 17, 64] {
        let g = cyclic(n);
        let x = CayleyGraph::new(&g, &ints(&g, [1, n as i64 - 1])).unwrap();
        let r = spectral_gap(&x).unwrap();
        // n ≤ 2 degenerates; here S = {±1} has two distinct elements
        let want = 1.0 - (2.0 * std::f64::consts::PI / n as f64).cos();
        assert!((r.lambda1 - want).abs() < 1e-8, "n = {n}: {} vs {want}", r.lambda1);
        assert!(r.holds);
    }
    let g = Group::new(GroupSpec::symmetric(3)).unwrap();
    let rest: Vec<Element> = g
        .elements()
        .unwrap()
        .into_iter()
        .filter(|e| e != g.identity())
        .collect();
    let x = CayleyGraph::new(&g, &ElementSet::new(&g, rest).unwrap()).unwrap();
    assert!((spectral_gap(&x).unwrap().lambda1 - 6.0 / 5.0).abs() < 1e-9);

    let g = cyclic(12);
    let x = CayleyGraph::build(&g, &ints(&g, [4, 8])).unwrap();
    let r = spectral_gap(&x).unwrap();
    assert!(!r.connected && r.lambda1 == 0.0);
}

#[test]
fn power_iteration_agrees_with_dense() {
    let caps = Caps {
        dense_eigen_vertices: 0,
        ..Caps::default()
    };
    let g = Group::with_caps(GroupSpec::Psl2 { p: 5 }, caps).unwrap();
    let it = spectral_gap(&CayleyGraph::standard(&g).unwrap()).unwrap();
    let g = Group::new(GroupSpec::Psl2 { p: 5 }).unwrap();
    let dense = spectral_gap(&CayleyGraph::standard(&g).unwrap()).unwrap();
    assert_eq!(
        (it.method, dense.method),
        (EigenMethod::PowerIteration, EigenMethod::Dense)
    );
    assert!(
        (it.lambda1 - dense.lambda1).abs() < 1e-6,
        "{} vs {}",
        it.lambda1,
        dense.lambda1
    );
}

#[test]
fn babai_rows() {
    let r = babai_report(&[3, 5, 7], &Caps::default()).unwrap();
    assert_eq!(r.rows.iter().map(|r| r.order).collect::<Vec<_>>(), vec![12, 60, 168]);
    assert!(r.monotone);
    assert_eq!(r.rows[1].diameter, psl2_oracle(5).1);
}
