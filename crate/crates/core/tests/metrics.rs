mod common;

use common::oracles::{distance_rows, exhaustive_bottleneck, permutation_wasserstein};
use common::{diagram, diagram_strategy, matrix, smooth_points};
use proptest::prelude::*;
use topocp_core::geometry::{aligned_pairing, correspondence_distortion};
use topocp_core::metrics::{bottleneck, pairwise_bottleneck, wasserstein};
use topocp_core::persistence::{rips_diagrams, RipsConfig};

const INF: f64 = f64::INFINITY;

#[test]
fn small_examples() {
    let a = diagram(1, &[(0.0, 2.0)]);
    let empty = diagram(1, &[]);
    assert_eq!(bottleneck(&a, &a).unwrap(), 0.0);
    assert_eq!(bottleneck(&a, &empty).unwrap(), 1.0);
    assert_eq!(bottleneck(&a, &diagram(1, &[(0.5, 2.5)])).unwrap(), 0.5);
    for q in [1.0, 2.0, 3.5] {
        assert_eq!(wasserstein(&a, &empty, q).unwrap(), 1.0);
        assert_eq!(wasserstein(&a, &a, q).unwrap(), 0.0);
    }
}

#[test]
fn essential_classes() {
    let a = diagram(1, &[(0.0, INF), (1.0, 2.0)]);
    let b = diagram(1, &[(0.25, INF)]);
    assert_eq!(bottleneck(&a, &b).unwrap(), 0.5);
    assert_eq!(bottleneck(&a, &diagram(1, &[(1.0, 2.0)])).unwrap(), INF);
    assert_eq!(wasserstein(&a, &diagram(1, &[]), 1.0).unwrap(), INF);
}

#[test]
fn dimension_mismatch_is_an_error() {
    assert!(bottleneck(&diagram(0, &[]), &diagram(1, &[])).is_err());
    assert!(wasserstein(&diagram(0, &[]), &diagram(1, &[]), 2.0).is_err());
    assert!(wasserstein(&diagram(1, &[]), &diagram(1, &[]), 0.5).is_err());
}

#[test]
fn pairwise_block_structure() {
    let a = diagram(1, &[(0.0, 2.0)]);
    let b = diagram(1, &[(0.0, 1.0), (3.0, 5.0)]);
    let m = pairwise_bottleneck(&[a.clone(), a.clone(), b.clone()]).unwrap();
    let x = bottleneck(&a, &b).unwrap();
    assert!(x > 0.0);
    let want = [0.0, 0.0, x, 0.0, 0.0, x, x, x, 0.0];
    assert_eq!(m.as_row_major(), &want);
    let same = pairwise_bottleneck(&vec![b; 4]).unwrap();
    assert!(same.as_row_major().iter().all(|&v| v == 0.0));
    assert!(pairwise_bottleneck(&[diagram(0, &[]), diagram(1, &[])]).is_err());
}

fn with_essentials(pairs: Vec<(f64, f64)>, ess: Vec<i32>) -> Vec<(f64, f64)> {
    pairs
        .into_iter()
        .chain(ess.into_iter().map(|b| (b as f64 * 0.5, INF)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bottleneck_matches_exhaustive(a in diagram_strategy(6), b in diagram_strategy(6)) {
        let got = bottleneck(&diagram(1, &a), &diagram(1, &b)).unwrap();
        prop_assert_eq!(got, exhaustive_bottleneck(&a, &b));
    }

    #[test]
    fn bottleneck_with_essentials_matches_exhaustive(
        a in diagram_strategy(4), b in diagram_strategy(4),
        ea in prop::collection::vec(0i32..6, 0..3), eb in prop::collection::vec(0i32..6, 0..3),
    ) {
        let a = with_essentials(a, ea);
        let b = with_essentials(b, eb);
        let got = bottleneck(&diagram(1, &a), &diagram(1, &b)).unwrap();
        prop_assert_eq!(got, exhaustive_bottleneck(&a, &b));
    }

    #[test]
    fn continuous_bottleneck_matches_exhaustive(
        a in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 0..6),
        b in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 0..6),
    ) {
        let fix = |v: Vec<(f64, f64)>| v.into_iter().map(|(x, l)| (x, x + l + 1e-3)).collect::<Vec<_>>();
        let (a, b) = (fix(a), fix(b));
        let got = bottleneck(&diagram(1, &a), &diagram(1, &b)).unwrap();
        prop_assert_eq!(got, exhaustive_bottleneck(&a, &b));
    }

    #[test]
    fn wasserstein_matches_permutations(a in diagram_strategy(5), b in diagram_strategy(5)) {
        let got = wasserstein(&diagram(1, &a), &diagram(1, &b), 2.0).unwrap();
        let want = permutation_wasserstein(&a, &b, 2.0);
        prop_assert!((got - want).abs() <= 1e-9 * want.max(1.0), "{} vs {}", got, want);
    }

    #[test]
    fn metric_axioms(a in diagram_strategy(5), b in diagram_strategy(5), c in diagram_strategy(5)) {
        let (a, b, c) = (diagram(1, &a), diagram(1, &b), diagram(1, &c));
        for dist in [
            |x: &_, y: &_| bottleneck(x, y).unwrap(),
            |x: &_, y: &_| wasserstein(x, y, 2.0).unwrap(),
        ] {
            prop_assert_eq!(dist(&a, &b), dist(&b, &a));
            prop_assert!(dist(&a, &a) == 0.0);
            prop_assert!(dist(&a, &c) <= dist(&a, &b) + dist(&b, &c) + 1e-9);
        }
        prop_assert!(bottleneck(&a, &b).unwrap() <= wasserstein(&a, &b, 2.0).unwrap() + 1e-9);
    }

    #[test]
    fn pairwise_entries_are_recomputed_bottlenecks(series in prop::collection::vec(diagram_strategy(4), 10)) {
        let dgms: Vec<_> = series.iter().map(|s| diagram(1, s)).collect();
        let m = pairwise_bottleneck(&dgms).unwrap();
        for t in 0..10 {
            for s in 0..10 {
                prop_assert_eq!(m.get(t, s), exhaustive_bottleneck(&series[t], &series[s]));
            }
        }
    }

    // With diameter-valued Rips filtrations the diagrams move by at most the
    // distortion of any correspondence (twice the Gromov-Hausdorff bound).
    #[test]
    fn diagrams_move_at_most_the_distortion(
        pts in smooth_points(3, 12, 2),
        shift in prop::collection::vec(prop::collection::vec(-0.1f64..0.1, 2), 12),
    ) {
        let moved: Vec<Vec<f64>> = pts.iter().zip(&shift).map(|(p, s)| vec![p[0] + s[0], p[1] + s[1]]).collect();
        let (da, db) = (matrix(&distance_rows(&pts)), matrix(&distance_rows(&moved)));
        let distortion = correspondence_distortion(&da, &db, &aligned_pairing(pts.len())).unwrap();
        let ga = rips_diagrams(&da, &RipsConfig::new(1)).unwrap();
        let gb = rips_diagrams(&db, &RipsConfig::new(1)).unwrap();
        for k in 0..2 {
            prop_assert!(bottleneck(&ga[k], &gb[k]).unwrap() <= distortion + 1e-9);
        }
    }
}

// Half the distortion is not a valid bound for this filtration convention:
// two points pulled apart by eta each lengthen the H0 bar by 2 eta.
#[test]
fn half_distortion_bound_fails_for_diameter_filtration() {
    let a = matrix(&distance_rows(&[vec![0.0], vec![1.0]]));
    let b = matrix(&distance_rows(&[vec![-0.1], vec![1.1]]));
    let distortion = correspondence_distortion(&a, &b, &aligned_pairing(2)).unwrap();
    let ga = rips_diagrams(&a, &RipsConfig::new(0)).unwrap();
    let gb = rips_diagrams(&b, &RipsConfig::new(0)).unwrap();
    let d = bottleneck(&ga[0], &gb[0]).unwrap();
    assert!((d - distortion).abs() < 1e-12);
    assert!(d > distortion / 2.0);
}
