mod common;

use common::{random_epoch, random_weights, rel};
use spatialvar::estimators::variance_single_epoch_large_n;
use spatialvar::montecarlo::*;
use spatialvar::synthetic::default_field;
use spatialvar::{EpochField, Error, ReportingModel, WeightVector};

fn rm(a: f64) -> ReportingModel {
    ReportingModel::new(a).unwrap()
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn ensemble_is_independent_of_worker_count() {
    let ef = random_epoch(25, 1);
    let w = random_weights(25, 1);
    let run = || simulate_epoch_ensemble(&ef, &w, &rm(0.2), 20_000, 99).unwrap();
    let one = in_pool(1, run);
    let four = in_pool(4, run);
    assert_eq!(
        one.ensemble_variance.to_bits(),
        four.ensemble_variance.to_bits()
    );
    assert_eq!(one.mean_of_means.to_bits(), four.mean_of_means.to_bits());
    assert_eq!(
        one.standard_error_of_variance.to_bits(),
        four.standard_error_of_variance.to_bits()
    );
    assert_eq!(one.rejected_count, four.rejected_count);
}

#[test]
fn ensemble_converges_to_enumeration() {
    for (n, a, seed) in [(5, 0.3, 1), (8, 0.5, 2), (12, 0.8, 3)] {
        let ef = random_epoch(n, seed);
        let w = random_weights(n, seed);
        let (mean, var) = exact_enumeration_epoch(&ef, &w, &rm(a)).unwrap();
        let mc = simulate_epoch_ensemble(&ef, &w, &rm(a), 1_000_000, seed).unwrap();
        assert!(
            rel(mc.ensemble_variance, var) < 0.01,
            "N={n}: {} vs {var}",
            mc.ensemble_variance
        );
        assert!((mc.mean_of_means - mean).abs() < 5.0 * (var / 1e6).sqrt());
        let z = (mc.ensemble_variance - var) / mc.standard_error_of_variance;
        assert!(z.abs() < 5.0, "N={n}: z = {z}");
    }
}

#[test]
fn rejection_rate_matches_geometric_expectation() {
    for (n, a) in [(1, 0.4), (3, 0.3), (6, 0.1)] {
        let ef = random_epoch(n, 5);
        let w = WeightVector::uniform(n).unwrap();
        let members = 200_000;
        let mc = simulate_epoch_ensemble(&ef, &w, &rm(a), members, 17).unwrap();
        let p0 = empty_mask_probability(&w, &rm(a));
        let expected = p0 / (1.0 - p0);
        let se = (p0 / (1.0 - p0).powi(2) / members as f64).sqrt();
        let observed = mc.rejected_count as f64 / members as f64;
        assert!(
            (observed - expected).abs() < 5.0 * se,
            "N={n} α={a}: {observed} vs {expected}"
        );
    }
}

#[test]
fn degenerate_ensembles_have_zero_variance() {
    let constant = EpochField::new(vec![3.25; 40]).unwrap();
    let w = WeightVector::uniform(40).unwrap();
    let mc = simulate_epoch_ensemble(&constant, &w, &rm(0.3), 1000, 0).unwrap();
    assert_eq!(mc.ensemble_variance, 0.0);
    assert_eq!(mc.mean_of_means, 3.25);

    let ef = random_epoch(40, 8);
    let full = simulate_epoch_ensemble(&ef, &w, &rm(1.0), 1000, 0).unwrap();
    assert_eq!(full.ensemble_variance, 0.0);
    assert_eq!(full.rejected_count, 0);
}

#[test]
fn infeasible_rejection_is_a_domain_error() {
    let ef = random_epoch(1, 2);
    let w = WeightVector::uniform(1).unwrap();
    let err = simulate_epoch_ensemble(&ef, &w, &rm(0.0005), 10, 0).unwrap_err();
    assert!(matches!(err, Error::Infeasible { .. }));
    assert_eq!(err.exit_code(), 2);
    let err = simulate_epoch_ensemble(&ef, &w, &rm(0.5), 1, 0).unwrap_err();
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn ensemble_matches_large_n_formula_at_moderate_n() {
    let field = default_field(0);
    let idx = subset_indices(3, field.len(), 100);
    let ef = field.select(&idx).unwrap();
    let w = WeightVector::uniform(100).unwrap();
    let mc = simulate_epoch_ensemble(&ef, &w, &rm(0.5), 100_000, 21).unwrap();
    let formula = variance_single_epoch_large_n(&rm(0.5), &ef).unwrap().value;
    let r = (mc.ensemble_variance - formula).abs() / mc.ensemble_variance;
    assert!(
        r - 3.0 * mc.standard_error_of_variance / mc.ensemble_variance < 0.1,
        "{r}"
    );
}

#[test]
fn subsets_are_distinct_and_seeded() {
    let a = subset_indices(4, 357, 200);
    let mut sorted = a.clone();
    sorted.sort_unstable();
    sorted.dedup();
    assert_eq!(sorted.len(), 200);
    assert!(a.iter().all(|&i| i < 357));
    assert_eq!(a, subset_indices(4, 357, 200));
    assert_ne!(a, subset_indices(5, 357, 200));
}

#[test]
fn sweep_grid_roundtrips_through_csv() {
    let config = SweepConfig {
        alphas: vec![0.5, 1.0],
        ns: vec![10, 20],
        members: 500,
        seed: 1,
        workers: Some(2),
    };
    let grid = relative_error_sweep(&default_field(1), &config).unwrap();
    assert_eq!(grid.cells.len(), 4);
    let full = grid.get(1.0, 20).unwrap();
    assert!(full.degenerate && full.mc_variance == 0.0 && full.relative_error == 0.0);
    assert!(!grid.get(0.5, 10).unwrap().degenerate);
    let mut buf = Vec::new();
    grid.write_csv(&mut buf).unwrap();
    let back = SweepGrid::read_csv(buf.as_slice()).unwrap();
    let mut again = Vec::new();
    back.write_csv(&mut again).unwrap();
    assert_eq!(buf, again);
}

#[test]
fn sweep_rejects_oversized_subsets() {
    let config = SweepConfig {
        alphas: vec![0.5],
        ns: vec![400],
        members: 10,
        seed: 0,
        workers: None,
    };
    assert!(relative_error_sweep(&default_field(0), &config).is_err());
}
