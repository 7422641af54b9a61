//! Relative error of the large-N single-epoch formula over an `α × N` grid,
//! written as CSV to stdout.

use spatialvar::montecarlo::{relative_error_sweep, SweepConfig};
use spatialvar::synthetic::default_field;

fn main() -> spatialvar::Result<()> {
    let config = SweepConfig {
        alphas: vec![0.1, 0.3, 0.5, 0.7, 0.9],
        ns: vec![10, 30, 100, 300],
        members: 20_000,
        seed: 0,
        workers: None,
    };
    let grid = relative_error_sweep(&default_field(config.seed), &config)?;
    grid.write_csv(std::io::stdout().lock())?;

    let flagged = grid.cells.iter().filter(|c| c.flag_gt_threshold).count();
    eprintln!("{flagged} of {} cells above 0.1", grid.cells.len());
    Ok(())
}
