//! Monte-Carlo ensemble over one synthetic epoch against the exact
//! single-epoch formulas.

use spatialvar::estimators::{variance_single_epoch, variance_single_epoch_large_n};
use spatialvar::montecarlo::simulate_epoch_ensemble;
use spatialvar::synthetic::default_field;
use spatialvar::{ReportingModel, WeightVector};

fn main() -> spatialvar::Result<()> {
    let ef = default_field(42);
    let w = WeightVector::uniform(ef.len())?;
    println!(
        "N = {}, spatial variance = {:.4}",
        ef.len(),
        ef.spatial_variance()
    );
    for a in [0.2, 0.5, 0.8] {
        let rm = ReportingModel::new(a)?;
        let mc = simulate_epoch_ensemble(&ef, &w, &rm, 50_000, 7)?;
        let full = variance_single_epoch(&rm, &ef)?.value;
        let large = variance_single_epoch_large_n(&rm, &ef)?.value;
        println!(
            "α={a}: mc {:.5} ± {:.5}  single-epoch {full:.5}  large-n {large:.5}  rejected {}",
            mc.ensemble_variance, mc.standard_error_of_variance, mc.rejected_count
        );
    }
    Ok(())
}
