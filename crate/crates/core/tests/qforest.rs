mod common;

use proptest::prelude::*;
use qml_roughness::metrics::mse;
use qml_roughness::qforest::{best_split, build_tree, Forest, ForestConfig, TIE_TOLERANCE};

/// Small integer-valued datasets: lots of duplicate values and exact ties.
fn small_dataset() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, usize)> {
    (2usize..=8, 1usize..=3, 1usize..=3).prop_flat_map(|(rows, feats, min_leaf)| {
        (
            prop::collection::vec(prop::collection::vec((0u8..4).prop_map(f64::from), feats), rows),
            prop::collection::vec((0u8..6).prop_map(f64::from), rows),
            Just(min_leaf),
        )
    })
}

fn distinct_dataset() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
    (2usize..=12, 1usize..=3).prop_flat_map(|(rows, feats)| {
        (
            prop::collection::vec(prop::collection::vec(-5.0f64..5.0, feats), rows)
                .prop_filter("distinct rows", |r| {
                    (0..r.len()).all(|i| (i + 1..r.len()).all(|j| r[i] != r[j]))
                }),
            prop::collection::vec(0.0f64..20.0, rows),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn best_split_matches_brute_force((f, y, min_leaf) in small_dataset()) {
        let rows: Vec<usize> = (0..y.len()).collect();
        let got = best_split(&f, &y, &rows, min_leaf).map(|s| (s.feature, s.threshold, s.decrease));
        let want = common::brute_force_split(&f, &y, min_leaf, TIE_TOLERANCE);
        match (got, want) {
            (None, None) => {}
            (Some(g), Some(w)) => {
                prop_assert_eq!(g.0, w.0);
                prop_assert_eq!(g.1, w.1);
                prop_assert!((g.2 - w.2).abs() < 1e-9);
            }
            other => prop_assert!(false, "mismatch {:?}", other),
        }
    }
}

proptest! {
    #[test]
    fn full_depth_tree_interpolates((f, y) in distinct_dataset()) {
        let cfg = ForestConfig { num_trees: 1, max_depth: usize::MAX, min_leaf: 1, bootstrap: false, seed: 0 };
        let forest = Forest::fit(&f, &y, &cfg).unwrap();
        let pred = forest.predict_all(&f).unwrap();
        prop_assert!(mse(&y, &pred).unwrap() < 1e-20);
    }

    #[test]
    fn predictions_are_bounded((f, y) in distinct_dataset(), seed in 0u64..50) {
        let cfg = ForestConfig { num_trees: 7, max_depth: 3, min_leaf: 1, bootstrap: true, seed };
        let forest = Forest::fit(&f, &y, &cfg).unwrap();
        let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for x in f.iter().chain(std::iter::once(&vec![100.0; f[0].len()])) {
            let per_tree: Vec<f64> = forest.trees.iter().map(|t| t.predict(x)).collect();
            let p = forest.predict(x).unwrap();
            let tmin = per_tree.iter().copied().fold(f64::INFINITY, f64::min);
            let tmax = per_tree.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(p >= tmin - 1e-12 && p <= tmax + 1e-12);
            prop_assert!(tmin >= lo - 1e-12 && tmax <= hi + 1e-12);
        }
    }

    #[test]
    fn forest_is_deterministic((f, y) in distinct_dataset(), seed in 0u64..1000) {
        let cfg = ForestConfig { num_trees: 5, max_depth: 4, min_leaf: 1, bootstrap: true, seed };
        prop_assert_eq!(Forest::fit(&f, &y, &cfg).unwrap(), Forest::fit(&f, &y, &cfg).unwrap());
    }

    #[test]
    fn row_order_does_not_change_the_tree((f, y) in distinct_dataset(), rot in 0usize..12) {
        let cfg = ForestConfig { num_trees: 1, max_depth: 6, min_leaf: 1, bootstrap: false, seed: 0 };
        let n = y.len();
        let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).rev().collect();
        let f2: Vec<Vec<f64>> = perm.iter().map(|&i| f[i].clone()).collect();
        let y2: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
        let a = build_tree(&f, &y, &(0..n).collect::<Vec<_>>(), &cfg, 0);
        let b = build_tree(&f2, &y2, &(0..n).collect::<Vec<_>>(), &cfg, 0);
        prop_assert_eq!(a.depth(), b.depth());
        let (la, lb) = (a.leaves(), b.leaves());
        prop_assert_eq!(la.len(), lb.len());
        for ((pa, ca), (pb, cb)) in la.iter().zip(&lb) {
            prop_assert_eq!(ca, cb);
            prop_assert!((pa - pb).abs() < 1e-12);
        }
    }
}

#[test]
fn forest_json_round_trip() {
    let f: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, (i % 3) as f64]).collect();
    let y: Vec<f64> = (0..10).map(|i| (i * i) as f64 / 10.0).collect();
    let forest = Forest::fit(&f, &y, &ForestConfig::default()).unwrap();
    let back = Forest::from_json(&forest.to_json().unwrap()).unwrap();
    assert_eq!(back, forest);
}
