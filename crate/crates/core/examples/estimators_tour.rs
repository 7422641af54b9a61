//! Every variance estimator on one field, next to the exact conditional
//! variance from mask enumeration.

use spatialvar::estimators::*;
use spatialvar::moments::compute_moment_set;
use spatialvar::montecarlo::exact_enumeration_field;
use spatialvar::{FieldAggregates, FieldStats, ReportingModel, WeightVector};

fn main() -> spatialvar::Result<()> {
    let n = 12;
    let mu: Vec<f64> = (0..n).map(|i| 1.0 + 0.3 * (i as f64 * 0.8).sin()).collect();
    let cov: Vec<f64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            (-((i as f64 - j as f64).abs()) / 3.0).exp()
        })
        .collect();
    let f = FieldStats::from_covariance(mu, cov)?;
    let w = WeightVector::uniform(n)?;
    let agg = FieldAggregates::from_stats(&f);

    println!(
        "{:<6} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "α", "exact", "second", "uniform", "large-n", "near-one"
    );
    for a in [0.6, 0.8, 0.9, 0.99, 1.0] {
        let rm = ReportingModel::new(a)?;
        let (_, exact) = exact_enumeration_field(&w, &rm, &f)?;
        let second = variance_second_order(&compute_moment_set(&w, &rm, &f)?);
        let uniform = variance_uniform_second_order(n, &rm, &agg)?;
        let large = variance_large_n(&rm, &w, &f)?;
        let near = variance_alpha_near_one(n, &rm, &agg)?;
        println!(
            "{a:<6} {exact:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            second.value, uniform.value, large.value, near.value
        );
    }
    println!("α = 1: {:.6}", variance_alpha_one(&w, &f)?.value);
    Ok(())
}
