mod common;

use common::{correlated_aggregates, random_epoch, random_psd_field, random_weights, rel};
use spatialvar::estimators::*;
use spatialvar::moments::{
    compute_moment_set, FieldAggregates, FieldStats, ReportingModel, WeightVector,
};
use spatialvar::montecarlo::{exact_enumeration_epoch, exact_enumeration_field};
use spatialvar::synthetic::{generate, SyntheticSpec};

fn rm(a: f64) -> ReportingModel {
    ReportingModel::new(a).unwrap()
}

#[test]
fn general_formula_equals_uniform_reduction() {
    for n in 2..=50 {
        let w = WeightVector::uniform(n).unwrap();
        let f = random_psd_field(n, 1000 + n as u64);
        let agg = FieldAggregates::from_stats(&f);
        for a in [0.2, 0.55, 0.9, 1.0] {
            let g = variance_second_order(&compute_moment_set(&w, &rm(a), &f).unwrap());
            let u = variance_uniform_second_order(n, &rm(a), &agg).unwrap();
            assert!(
                rel(g.value, u.value) < 1e-10,
                "N={n} α={a}: {} vs {}",
                g.value,
                u.value
            );
        }
    }
}

#[test]
fn constant_field_at_full_reporting_is_zero() {
    for n in [1, 2, 7, 30] {
        let w = random_weights(n, n as u64);
        let c = 2.5;
        let f = FieldStats::new(vec![c; n], vec![c * c; n * n]).unwrap();
        let v = variance_second_order(&compute_moment_set(&w, &rm(1.0), &f).unwrap());
        assert!(v.value.abs() <= 1e-12 * c * c, "N={n}: {}", v.value);
    }
}

#[test]
fn full_reporting_matches_alpha_one_reduction() {
    for n in [2, 5, 12] {
        let w = random_weights(n, 7 * n as u64);
        let f = random_psd_field(n, 7 * n as u64);
        let g = variance_second_order(&compute_moment_set(&w, &rm(1.0), &f).unwrap());
        let one = variance_alpha_one(&w, &f).unwrap();
        assert!(rel(g.value, one.value) < 1e-10);
        let (_, exact) = exact_enumeration_field(&w, &rm(1.0), &f).unwrap();
        assert!(rel(one.value, exact) < 1e-12);
    }
}

#[test]
fn near_one_reduction_is_exact_at_full_reporting() {
    for n in [2, 20, 500] {
        let agg = correlated_aggregates(n);
        let full = variance_uniform_second_order(n, &rm(1.0), &agg)
            .unwrap()
            .value;
        let near = variance_alpha_near_one(n, &rm(1.0), &agg).unwrap().value;
        assert!(rel(full, near) < 1e-12);
    }
}

#[test]
fn near_one_gap_shrinks_with_n() {
    let gap = |n: usize| {
        let agg = correlated_aggregates(n);
        let a = rm(0.95);
        let full = variance_uniform_second_order(n, &a, &agg).unwrap().value;
        rel(full, variance_alpha_near_one(n, &a, &agg).unwrap().value)
    };
    let (g1, g2) = (gap(50), gap(500));
    assert!(g1 < 0.01 && g2 < g1 / 5.0, "{g1} {g2}");
}

#[test]
fn second_order_tracks_enumeration_near_full_reporting() {
    for n in [6, 10, 14] {
        let w = WeightVector::uniform(n).unwrap();
        let f = random_psd_field(n, 50 + n as u64);
        let err = |a: f64| {
            let (_, exact) = exact_enumeration_field(&w, &rm(a), &f).unwrap();
            rel(
                variance_second_order(&compute_moment_set(&w, &rm(a), &f).unwrap()).value,
                exact,
            )
        };
        let errs: Vec<f64> = [0.7, 0.8, 0.9, 0.97].into_iter().map(err).collect();
        assert!(errs[2] < 0.05, "N={n}: {errs:?}");
        assert!(errs.windows(2).all(|p| p[1] < p[0]), "N={n}: {errs:?}");
    }
}

#[test]
fn large_n_limit_is_approached() {
    let n = 10_000;
    let agg = correlated_aggregates(n);
    for a in [0.3, 0.8] {
        let finite = variance_uniform_second_order(n, &rm(a), &agg)
            .unwrap()
            .value;
        let limit = variance_large_n_uniform(&rm(a), &agg).unwrap().value;
        assert!(rel(finite, limit) < 0.01, "α={a}: {finite} vs {limit}");
    }
}

#[test]
fn snapshot_large_n_limit_is_spatial_variance_form() {
    // a snapshot has O(1/N) variance, so σ_R²/α² is not its limit
    let ef = generate(
        &SyntheticSpec {
            sites: 10_000,
            ..SyntheticSpec::default()
        },
        11,
    )
    .unwrap();
    let agg = FieldAggregates::from_epoch(&ef);
    let a = rm(0.8);
    let finite = variance_uniform_second_order(ef.len(), &a, &agg)
        .unwrap()
        .value;
    let epoch = variance_single_epoch_large_n(&a, &ef).unwrap().value;
    assert!(rel(finite, epoch) < 0.01, "{finite} vs {epoch}");
}

#[test]
fn large_n_general_agrees_with_uniform_specialization() {
    let n = 40;
    let f = random_psd_field(n, 9);
    let w = WeightVector::uniform(n).unwrap();
    let agg = FieldAggregates::from_stats(&f);
    for a in [0.3, 0.7, 1.0] {
        let g = variance_large_n(&rm(a), &w, &f).unwrap().value;
        let u = variance_large_n_uniform(&rm(a), &agg).unwrap().value;
        assert!(rel(g, u) < 1e-12);
    }
}

#[test]
fn single_epoch_formulas_agree_at_large_n() {
    let ef = generate(&SyntheticSpec::default(), 5).unwrap();
    for a in [0.3, 0.5, 0.9] {
        let exact = variance_single_epoch(&rm(a), &ef).unwrap().value;
        let large = variance_single_epoch_large_n(&rm(a), &ef).unwrap().value;
        assert!(rel(exact, large) < 0.05, "α={a}: {exact} vs {large}");
    }
    assert_eq!(variance_single_epoch(&rm(1.0), &ef).unwrap().value, 0.0);
}

#[test]
fn unit_spatial_variance_gives_inverse_n_scaling() {
    // ±1 alternating field has σ_s² = 1
    let ef = EpochField::new(
        (0..100)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect(),
    )
    .unwrap();
    assert!((ef.spatial_variance() - 1.0).abs() < 1e-15);
    let large = variance_single_epoch_large_n(&rm(0.5), &ef).unwrap().value;
    assert!((large - 0.01).abs() < 1e-15);
    let exact = variance_single_epoch(&rm(0.5), &ef).unwrap().value;
    assert!(rel(exact, large) < 0.1);
}

#[test]
fn single_epoch_tracks_enumeration() {
    for n in [10, 16, 20] {
        let ef = random_epoch(n, n as u64);
        let w = WeightVector::uniform(n).unwrap();
        let err = |a: f64| {
            let (_, exact) = exact_enumeration_epoch(&ef, &w, &rm(a)).unwrap();
            rel(variance_single_epoch(&rm(a), &ef).unwrap().value, exact)
        };
        let errs: Vec<f64> = [0.6, 0.8, 0.9, 0.97].into_iter().map(err).collect();
        assert!(errs[2] < 0.15, "N={n}: {errs:?}");
        assert!(errs.windows(2).all(|p| p[1] < p[0]), "N={n}: {errs:?}");
    }
}

#[test]
fn correction_terms_vanish_at_full_reporting() {
    for n in [1, 10, 1000] {
        let c = correction_terms(n, &rm(1.0)).unwrap();
        assert_eq!(c.first, [0.0, 0.0]);
        assert_eq!(c.second, [0.0, 0.0]);
        assert_eq!(c.third, [0.0, 0.0]);
        assert_eq!(c.third_cubic, 0.0);
        assert_eq!(c.third_bracket(), 1.0);
    }
}
