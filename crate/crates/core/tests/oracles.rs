mod common;

use std::sync::Arc;

use common::*;
use fastscc::special::normal_upper_quantile;
use fastscc::*;
use rand::Rng;

#[test]
fn kaplan_meier_matches_exact_product_limit() {
    let mut rng = rng(11);
    for _ in 0..500 {
        let n = rng.random_range(1..40);
        let times: Vec<i64> = (0..n).map(|_| rng.random_range(1..15)).collect();
        let events: Vec<bool> = (0..n).map(|_| rng.random_bool(0.7)).collect();
        let as_f: Vec<f64> = times.iter().map(|&t| t as f64).collect();
        let curve = kaplan_meier(&PopulationSample::from_pairs(0, &as_f, &events).unwrap()).unwrap();
        let expected = km_oracle(&times, &events);
        assert_eq!(curve.event_times.len(), expected.len());
        for ((t, s), (et, es)) in curve.event_times.iter().zip(&curve.survival).zip(&expected) {
            assert_eq!(*t, *et as f64);
            assert!((s - q_to_f64(*es)).abs() < 1e-12);
        }
    }
}

#[test]
fn logrank_matches_exact_two_sample() {
    let a = [
        (1, true),
        (2, true),
        (3, false),
        (4, true),
        (4, true),
        (6, false),
        (7, true),
    ];
    let b = [(2, true), (3, true), (5, false), (5, true), (8, true), (9, false)];
    let sample = |label, g: &[(i64, bool)]| {
        let t: Vec<f64> = g.iter().map(|x| x.0 as f64).collect();
        let e: Vec<bool> = g.iter().map(|x| x.1).collect();
        PopulationSample::from_pairs(label, &t, &e).unwrap()
    };
    let out = weighted_logrank(&[sample(0, &a), sample(1, &b)], WeightScheme::LogRank).unwrap();
    let (o, e, _, stat) = logrank_two_sample_oracle(&a, &b);
    assert!((out.observed[0] - q_to_f64(o)).abs() < 1e-12);
    assert!((out.expected[0] - q_to_f64(e)).abs() < 1e-12);
    assert!((out.statistic - q_to_f64(stat)).abs() < 1e-10);
    assert_eq!(out.df, 1);
}

#[test]
fn logrank_random_two_sample_against_exact() {
    let mut rng = rng(12);
    for _ in 0..200 {
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<(i64, bool)> {
            let n = rng.random_range(3..25);
            (0..n)
                .map(|_| (rng.random_range(1..12), rng.random_bool(0.75)))
                .collect()
        };
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let (_, _, v, stat) = logrank_two_sample_oracle(&a, &b);
        if *v.numer() == 0 {
            continue;
        }
        let to = |label, g: &[(i64, bool)]| {
            let t: Vec<f64> = g.iter().map(|x| x.0 as f64).collect();
            let e: Vec<bool> = g.iter().map(|x| x.1).collect();
            PopulationSample::from_pairs(label, &t, &e).unwrap()
        };
        let out = weighted_logrank(&[to(0, &a), to(1, &b)], WeightScheme::LogRank).unwrap();
        let exact = q_to_f64(stat);
        assert!((out.statistic - exact).abs() <= 1e-9 * exact.max(1.0));
    }
}

#[test]
fn chi_square_tail_matches_quadrature() {
    assert!((chi_square_sf(3.841458820694124, 1).unwrap() - 0.05).abs() < 1e-9);
    for df in 1..=8 {
        for x in [0.1, 0.5, 1.0, 2.5, 5.0, 10.0, 20.0] {
            let got = chi_square_sf(x, df).unwrap();
            let want = chi2_sf_oracle(x, df);
            assert!((got - want).abs() < 1e-8, "df {df} x {x}: {got} vs {want}");
        }
    }
}

#[test]
fn normal_quantile_matches_bisection() {
    for p in [0.5, 0.1, 0.05, 0.025, 0.01, 0.001, 1e-5] {
        let got = normal_upper_quantile(p);
        let want = normal_upper_quantile_oracle(p);
        assert!((got - want).abs() < 1e-7, "p {p}: {got} vs {want}");
    }
    assert!((bonferroni_critical_value(0.05, 1) - 1.6448536269514722).abs() < 1e-9);
}

#[test]
fn hommel_matches_closed_testing() {
    let mut rng = rng(13);
    for _ in 0..2000 {
        let n = rng.random_range(1..=7);
        let p: Vec<f64> = (0..n).map(|_| rng.random::<f64>().powi(2)).collect();
        let got = adjust(&p, CorrectionMethod::Hommel).unwrap();
        let want = hommel_closed_testing(&p);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12, "{p:?}: {got:?} vs {want:?}");
        }
    }
}

#[test]
fn kmeans_finds_exhaustive_optimum() {
    let mut rng = rng(14);
    let grid = Arc::new(TimeGrid::from_points((1..=12).map(f64::from).collect()).unwrap());
    for trial in 0..100 {
        let j = rng.random_range(3..=8);
        let k = rng.random_range(1..=3.min(j));
        let rows = random_curves(&mut rng, j, 12);
        let curves: Vec<GridCurve> = rows
            .iter()
            .map(|r| GridCurve::new(grid.clone(), r.clone()).unwrap())
            .collect();
        let fit = cluster(
            &curves,
            k,
            &ClusterConfig {
                seed: trial,
                ..Default::default()
            },
        )
        .unwrap();
        let (best, _) = exhaustive_kmeans(&rows, k);
        assert!(
            (fit.wss - best).abs() <= 1e-9 * best.max(1.0),
            "trial {trial}: {} vs {best}",
            fit.wss
        );
    }
}

#[test]
fn two_bundles_are_separated() {
    let grid = Arc::new(TimeGrid::from_points((1..=10).map(f64::from).collect()).unwrap());
    let rates: [f64; 6] = [0.10, 0.11, 0.12, 0.60, 0.62, 0.64];
    let curves: Vec<GridCurve> = rates
        .iter()
        .map(|r| GridCurve::new(grid.clone(), (1..=10).map(|t| (-r * t as f64).exp()).collect()).unwrap())
        .collect();
    let fit = cluster(&curves, 2, &ClusterConfig::default()).unwrap();
    assert_eq!(fit.partition.groups(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
}
