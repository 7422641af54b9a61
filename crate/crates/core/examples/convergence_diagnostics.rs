//! Ratio condition, Hoeffding tail and standard-deviation distance across
//! network sizes, with an empirical tail for comparison.

use spatialvar::convergence::convergence_report;
use spatialvar::montecarlo::empirical_tail_frequency;
use spatialvar::{ReportingModel, WeightVector};

fn main() -> spatialvar::Result<()> {
    println!(
        "{:<5} {:<6} {:>10} {:>12} {:>12} {:>8}",
        "α", "N", "sd-dist", "bound", "empirical", "verdict"
    );
    for a in [0.1, 0.3, 0.6] {
        let rm = ReportingModel::new(a)?;
        for n in [10, 100, 1000] {
            let w = WeightVector::uniform(n)?;
            let r = convergence_report(&w, &rm);
            let freq = empirical_tail_frequency(&w, &rm, 100_000, 1);
            println!(
                "{a:<5} {n:<6} {:>10.3} {:>12.3e} {:>12.3e} {:>8}",
                r.sd_distance,
                r.hoeffding_tail,
                freq,
                r.verdict.as_str()
            );
        }
    }
    Ok(())
}
