//! Mixed moments for an area-weighted network, checked against brute-force
//! enumeration of all reporting masks.

use spatialvar::moments::compute_moment_set;
use spatialvar::montecarlo::exact_moment_enumeration;
use spatialvar::{FieldStats, ReportingModel, WeightVector};

fn main() -> spatialvar::Result<()> {
    // cos(latitude) weights for six stations
    let lat: [f64; 6] = [5.0, 15.0, 25.0, 35.0, 45.0, 60.0];
    let w = WeightVector::normalized(lat.iter().map(|d| d.to_radians().cos()).collect())?;
    let mu = vec![27.0, 26.0, 22.0, 17.0, 11.0, 3.0];
    let n = mu.len();
    let cov: Vec<f64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            4.0 * 0.5f64.powi((i as i32 - j as i32).abs())
        })
        .collect();
    let f = FieldStats::from_covariance(mu, cov)?;
    let rm = ReportingModel::new(0.7)?;

    let ms = compute_moment_set(&w, &rm, &f)?;
    for (name, value) in ms.entries() {
        println!("{name:<11} {value:>14.8}");
    }

    let (es2, ers2, er2s2) = exact_moment_enumeration(&w, &rm, &f, 2)?;
    println!("\nenumerated l=2: {es2:.8} {ers2:.8} {er2s2:.8}");
    Ok(())
}
