//! Uniform-weight moments of `S` as polynomials in `α`, and how fast they
//! approach `α^l`.

use spatialvar::moments::{moment_s_uniform, s_coefficients};
use spatialvar::ReportingModel;

fn main() -> spatialvar::Result<()> {
    let n = 7;
    for l in 1..=4 {
        let coefficients = s_coefficients(l, n)?;
        println!("E S^{l} at N={n}: coefficients of α^1.. = {coefficients:?}");
    }

    let rm = ReportingModel::new(0.3)?;
    println!("\nrelative gap to α^l at α=0.3");
    for n in [10, 100, 1000, 10_000] {
        let gaps: Vec<String> = (1..=4)
            .map(|l| {
                let v = moment_s_uniform(l, n, &rm).unwrap();
                format!("{:.2e}", v / 0.3f64.powi(l as i32) - 1.0)
            })
            .collect();
        println!("N={n:<6} {}", gaps.join("  "));
    }
    Ok(())
}
