use super::*;
use crate::group::{Group, GroupSpec};
use std::collections::BTreeSet;

fn z() -> Group {
    Group::new(GroupSpec::FreeAbelian { d: 1 }).unwrap()
}

fn ints(g: &Group, v: impl IntoIterator<Item = i64>) -> ElementSet {
    ElementSet::new(g, v.into_iter().map(|x| Element::Ints(vec![x]))).unwrap()
}

/// Brute-force `|A − B|` in Z.
fn diff_size(a: &[i64], b: &[i64]) -> usize {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x - y))
        .collect::<BTreeSet<_>>()
        .len()
}

#[test]
fn doubling_examples() {
    let g = z();
    let r = doubling_report(&ints(&g, [0, 1, 3]), 3).unwrap();
    assert_eq!(r.doubling, Rat::int(2));
    let n = 10;
    let r = doubling_report(&ints(&g, 0..=n), 6).unwrap();
    assert_eq!(r.doubling, Rat::new(2 * n + 1, n + 1));
    assert!(r.small_tripling_holds);
    assert!(r.pluennecke.unwrap().iter().all(|row| row.holds));

    let c6 = Group::new(GroupSpec::Cyclic { n: 6 }).unwrap();
    let h = ints(&c6, [0, 2, 4]);
    let r = doubling_report(&h, 4).unwrap();
    assert_eq!((r.doubling, r.tripling), (Rat::one(), Rat::one()));
}

#[test]
fn ruzsa_examples() {
    let g = z();
    let a = ints(&g, [0, 1]);
    let b = ints(&g, [0, 2]);
    let v = ruzsa_distance(&a, &b).unwrap();
    assert_eq!(diff_size(&[0, 1], &[0, 2]), 4);
    assert_eq!(v.ratio(), Rat::new(16, 4));
    assert!((v.distance() - 2f64.ln()).abs() < 1e-12);

    let c6 = Group::new(GroupSpec::Cyclic { n: 6 }).unwrap();
    let h = ints(&c6, [0, 3]);
    assert!(ruzsa_distance(&h, &h).unwrap().is_zero());
    assert_eq!(triangle_slack(&h, &h, &h).unwrap(), Rat::one());

    let c = ints(&g, [0, 4]);
    // |B||A−C| = 2·4 ≤ |A−B||B−C| = 4·4
    assert_eq!(triangle_slack(&a, &b, &c).unwrap(), Rat::new(16 * 16, 8 * 8));
}

#[test]
fn ruzsa_cover_examples() {
    let g = z();
    let n = 5;
    let a = ints(&g, -2 * n..=2 * n);
    let b = ints(&g, -n..=n);
    let w = ruzsa_cover(&a, &b).unwrap();
    assert!(w.x.len() <= 3);
    assert!(covers(&a, &w.x, &ints(&g, -2 * n..=2 * n)));

    let c6 = Group::new(GroupSpec::Cyclic { n: 6 }).unwrap();
    let h = ints(&c6, [0, 2, 4]);
    assert_eq!(ruzsa_cover(&h, &h).unwrap().x.len(), 1);
}

/// Minimum cover size of `[-2N, 2N]` by translates of `[-N, N]`, by
/// exhaustive search over translate subsets.
fn interval_min_cover(n: i64) -> usize {
    let target: Vec<i64> = (-2 * n..=2 * n).collect();
    let cands: Vec<i64> = (-3 * n..=3 * n).collect();
    for k in 1..=cands.len() {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            if target.iter().all(|t| idx.iter().any(|&i| (t - cands[i]).abs() <= n)) {
                return k;
            }
            let mut i = k;
            while i > 0 && idx[i - 1] == cands.len() - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    unreachable!()
}

#[test]
fn approx_constant_interval() {
    let g = z();
    let n = 5;
    let r = approx_constant(&ints(&g, -n..=n), true).unwrap();
    assert_eq!(interval_min_cover(n), 2);
    assert_eq!(r.k_exact, Some(2));
    assert_eq!(r.k_greedy, 2);
    assert_eq!(r.witness.x, ints(&g, [-5, 6]));
    assert!(r.k_exact.unwrap() <= r.k_greedy);
}

#[test]
fn approx_constant_subgroup_and_box() {
    let c12 = Group::new(GroupSpec::Cyclic { n: 12 }).unwrap();
    let h = ints(&c12, [0, 3, 6, 9]);
    assert_eq!(approx_constant(&h, true).unwrap().k_exact, Some(1));

    let z2 = Group::new(GroupSpec::FreeAbelian { d: 2 }).unwrap();
    let boxed: Vec<Element> = (-2..=2)
        .flat_map(|x| (-3..=3).map(move |y| Element::Ints(vec![x, y])))
        .collect();
    let p = ElementSet::new(&z2, boxed).unwrap();
    let r = approx_constant(&p, true).unwrap();
    assert!(r.k_exact.unwrap() <= 4);

    let not_sym = ints(&z(), [0, 1]);
    assert!(matches!(approx_constant(&not_sym, false), Err(Error::Precondition(_))));
    let no_id = ints(&z(), [-1, 1]);
    assert!(matches!(approx_constant(&no_id, false), Err(Error::Precondition(_))));
}

#[test]
fn lemma210_examples() {
    let g = z();
    let a = ints(&g, -1..=1);
    let r = lemma210_witness(&a).unwrap();
    assert_eq!(r.fifth_power_size, 11);
    assert!(r.witness.x.len() <= 3);
    assert!(covers(&ints(&g, -4..=4), &r.witness.x, &ints(&g, -2..=2)));

    let c6 = Group::new(GroupSpec::Cyclic { n: 6 }).unwrap();
    assert_eq!(lemma210_witness(&ints(&c6, [0, 2, 4])).unwrap().witness.x.len(), 1);
}

#[test]
fn lemma211_examples() {
    let c6 = Group::new(GroupSpec::Cyclic { n: 6 }).unwrap();
    let h = ints(&c6, [0, 2, 4]);
    let e = ints(&c6, [0]);
    let r = lemma211_witness(&h, &e, &h, &e).unwrap();
    assert_eq!(r.witness.x, e);

    let g = z();
    let a = ints(&g, -2..=2);
    let b = ints(&g, -3..=3);
    let xa = approx_constant(&a, true).unwrap().exact_witness.unwrap();
    let yb = approx_constant(&b, true).unwrap().exact_witness.unwrap();
    let r = lemma211_witness(&a, &xa, &b, &yb).unwrap();
    assert!(r.z_size as u128 <= r.z_bound);

    let bad = ints(&g, [0]);
    assert!(matches!(
        lemma211_witness(&a, &bad, &b, &yb),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn escape_norm_examples() {
    let g = z();
    let a = ints(&g, -2..=2);
    assert_eq!(
        escape_norm(&a, &Element::Ints(vec![1])).unwrap(),
        EscapeNorm::Finite {
            n: 2,
            value: Rat::new(1, 2)
        }
    );
    assert_eq!(escape_norm(&a, &Element::Ints(vec![0])).unwrap(), EscapeNorm::Zero);
    assert_eq!(escape_norm(&a, &Element::Ints(vec![7])).unwrap(), EscapeNorm::Infinite);
    let c6 = Group::new(GroupSpec::Cyclic { n: 6 }).unwrap();
    let h = ints(&c6, [0, 2, 4]);
    for x in h.iter() {
        assert_eq!(escape_norm(&h, x).unwrap(), EscapeNorm::Zero);
    }
    assert!(escape_profile(&a).unwrap().max_ratio.is_some());
}

#[test]
fn sumproduct_examples() {
    // geometric progression: A·A = {2^0, …, 2^6}
    let r = sumproduct_stats(13, &[1, 2, 4, 8], None).unwrap();
    let oracle: BTreeSet<u64> = [1u64, 2, 4, 8]
        .iter()
        .flat_map(|x| [1u64, 2, 4, 8].iter().map(move |y| x * y % 13))
        .collect();
    assert_eq!(oracle.len(), 7);
    assert_eq!(r.productset, 7);
    assert_eq!(r.sumset, 9);
    let all: Vec<u64> = (0..13).collect();
    let r = sumproduct_stats(13, &all, None).unwrap();
    assert_eq!(r.sumset, 13);
    assert!((r.exponent.unwrap() - 1.0).abs() < 1e-12);
    let r = sumproduct_stats(7, &[0], Some(3)).unwrap();
    assert_eq!((r.sumset, r.productset), (1, 1));
    assert!(r.minimizer.unwrap().min_max_growth >= 3);
    assert!(sumproduct_stats(12, &[1], None).is_err());
    assert!(sumproduct_stats(7, &[7], None).is_err());
}
