//! Relative error of the large-N single-epoch formula over an `α × N` grid.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::estimators::{variance_single_epoch_large_n, EpochField};
use crate::moments::{ReportingModel, WeightVector};

use super::ensemble::simulate_epoch_ensemble;
use super::stream::{mix64, sample_without_replacement, Domain, Stream};

/// Relative error above which a cell is flagged.
pub const ERROR_THRESHOLD: f64 = 0.1;

pub const CSV_HEADER: [&str; 8] = [
    "alpha",
    "n",
    "mc_variance",
    "formula_variance",
    "relative_error",
    "flag_gt_0.1",
    "mc_std_error",
    "degenerate",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub alphas: Vec<f64>,
    pub ns: Vec<usize>,
    pub members: usize,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool. Results do not depend
    /// on this.
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub alpha: f64,
    pub n: usize,
    pub mc_variance: f64,
    pub formula_variance: f64,
    /// `|MC − formula| / MC`
    pub relative_error: f64,
    pub flag_gt_threshold: bool,
    pub mc_std_error: f64,
    /// No sampling variability (`α = 1` or a constant subset).
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepGrid {
    pub cells: Vec<SweepCell>,
}

/// Seed of the ensemble for one grid cell.
pub fn cell_seed(seed: u64, alpha: f64, n: usize) -> u64 {
    mix64(mix64(seed ^ alpha.to_bits()) ^ n as u64)
}

/// The random subset of `n` sites used for every cell with that `n`.
pub fn subset_indices(seed: u64, field_len: usize, n: usize) -> Vec<usize> {
    let stream = Stream::new(seed, Domain::Subset).substream(n as u64);
    sample_without_replacement(&stream, field_len, n)
}

fn run_cell(ef: &EpochField, alpha: f64, n: usize, members: usize, seed: u64) -> Result<SweepCell> {
    let rm = ReportingModel::new(alpha)?;
    let sub = ef.select(&subset_indices(seed, ef.len(), n))?;
    let w = WeightVector::uniform(n)?;
    let mc = simulate_epoch_ensemble(&sub, &w, &rm, members, cell_seed(seed, alpha, n))?;
    let formula = variance_single_epoch_large_n(&rm, &sub)?.value;
    let mc_variance = mc.ensemble_variance;
    let degenerate = mc_variance == 0.0;
    let relative_error = if !degenerate {
        (mc_variance - formula).abs() / mc_variance
    } else if formula == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(SweepCell {
        alpha,
        n,
        mc_variance,
        formula_variance: formula,
        relative_error,
        flag_gt_threshold: relative_error > ERROR_THRESHOLD,
        mc_std_error: mc.standard_error_of_variance,
        degenerate,
    })
}

/// Runs every `(α, N)` cell, `α` outermost. Each cell draws its own seeded
/// subset of `N` sites and compares the ensemble variance with the
/// large-N single-epoch formula.
pub fn relative_error_sweep(ef: &EpochField, config: &SweepConfig) -> Result<SweepGrid> {
    if config.alphas.is_empty() || config.ns.is_empty() {
        return Err(Error::invalid("sweep grids must be nonempty"));
    }
    if let Some(&n) = config.ns.iter().find(|&&n| n > ef.len() || n == 0) {
        return Err(Error::invalid(format!(
            "subset size {n} outside 1..={} sites in the field",
            ef.len()
        )));
    }
    let body = || -> Result<SweepGrid> {
        let mut cells = Vec::with_capacity(config.alphas.len() * config.ns.len());
        for &alpha in &config.alphas {
            for &n in &config.ns {
                cells.push(run_cell(ef, alpha, n, config.members, config.seed)?);
            }
        }
        Ok(SweepGrid { cells })
    };
    match config.workers {
        None => body(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(body),
    }
}

impl SweepCell {
    pub fn record(&self) -> [String; 8] {
        [
            self.alpha.to_string(),
            self.n.to_string(),
            self.mc_variance.to_string(),
            self.formula_variance.to_string(),
            self.relative_error.to_string(),
            self.flag_gt_threshold.to_string(),
            self.mc_std_error.to_string(),
            self.degenerate.to_string(),
        ]
    }
}

impl SweepGrid {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::invalid(format!("csv write: {e}"));
        w.write_record(CSV_HEADER).map_err(io)?;
        for cell in &self.cells {
            w.write_record(cell.record()).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::invalid(format!("csv write: {e}")))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let parse_err = |line: u64, message: String| Error::Parse {
            path: "<sweep>".into(),
            line,
            message,
        };
        let header = r
            .headers()
            .map_err(|e| parse_err(1, e.to_string()))?
            .clone();
        if header.iter().ne(CSV_HEADER) {
            return Err(parse_err(1, format!("unexpected header {header:?}")));
        }
        let mut cells = Vec::new();
        for (k, rec) in r.records().enumerate() {
            let line = k as u64 + 2;
            let rec = rec.map_err(|e| parse_err(line, e.to_string()))?;
            let f = |i: usize| -> Result<f64> {
                rec[i].parse().map_err(|_| {
                    parse_err(
                        line,
                        format!("bad number '{}' in {}", &rec[i], CSV_HEADER[i]),
                    )
                })
            };
            let b = |i: usize| -> Result<bool> {
                rec[i].parse().map_err(|_| {
                    parse_err(line, format!("bad flag '{}' in {}", &rec[i], CSV_HEADER[i]))
                })
            };
            cells.push(SweepCell {
                alpha: f(0)?,
                n: rec[1]
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad site count '{}'", &rec[1])))?,
                mc_variance: f(2)?,
                formula_variance: f(3)?,
                relative_error: f(4)?,
                flag_gt_threshold: b(5)?,
                mc_std_error: f(6)?,
                degenerate: b(7)?,
            });
        }
        Ok(SweepGrid { cells })
    }

    pub fn get(&self, alpha: f64, n: usize) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.n == n && (c.alpha - alpha).abs() < 1e-12)
    }
}
