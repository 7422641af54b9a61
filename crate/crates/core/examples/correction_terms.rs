//! The `1/N` and `1/N²` bracket corrections of the uniform-weight estimator.

use spatialvar::estimators::correction_terms;
use spatialvar::ReportingModel;

fn main() -> spatialvar::Result<()> {
    for a in [0.3, 0.6, 0.9] {
        let rm = ReportingModel::new(a)?;
        for n in [10, 100, 1000] {
            let c = correction_terms(n, &rm)?;
            println!(
                "α={a} N={n:<5} brackets {:.6} {:.6} {:.6}",
                c.first_bracket(),
                c.second_bracket(),
                c.third_bracket()
            );
        }
    }
    Ok(())
}
