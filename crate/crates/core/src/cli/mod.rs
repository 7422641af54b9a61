//! Command-line front end.
//!
//! Every subcommand is a thin wrapper around one library call; numbers are
//! printed with Rust's shortest round-trip formatting so that output can be
//! re-read bit for bit. Errors become a single stderr line
//! `error: kind=<kind> reason=<message>` and exit status 1 (bad input) or
//! 2 (domain or numeric failure).

pub mod grid;
pub mod io;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::combinatorics::{stirling2, StirlingTable};
use crate::convergence::convergence_report;
use crate::error::{Error, Result};
use crate::estimators::{self, EpochField, VarianceEstimate};
use crate::moments::{
    compute_moment_set, FieldAggregates, FieldStats, ReportingModel, WeightVector,
};
use crate::montecarlo::{relative_error_sweep, simulate_epoch_ensemble, SweepConfig};
use crate::synthetic;

pub use grid::{parse_alpha_grid, parse_n_grid, parse_real_grid};
pub use io::{
    ingest_epoch_csv, ingest_field_stats_csv, ingest_weights_csv, write_epoch_csv, Cell, Format,
    Table,
};

#[derive(Debug, Parser)]
#[command(
    name = "spatialvar",
    version,
    about = "Variance of spatial means under randomly missing observations"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stirling numbers of the second kind: one entry, or a full row.
    Stirling {
        #[arg(long)]
        l: u32,
        #[arg(long)]
        m: Option<u32>,
    },
    /// The ten mixed moments used by the second-order estimator.
    Moments {
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        input: FieldInput,
    },
    /// One variance estimate.
    Variance {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        input: FieldInput,
    },
    /// Convergence diagnostics for uniform weights over `--n` sites or for
    /// a weight file.
    Check {
        #[arg(long)]
        alpha: f64,
        #[arg(long, required_unless_present = "weights")]
        n: Option<usize>,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Monte-Carlo ensemble of reporting masks over one epoch.
    Simulate {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        members: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Relative error of the large-N single-epoch formula over an α × N grid.
    Sweep {
        #[arg(long)]
        alphas: String,
        #[arg(long)]
        ns: String,
        /// Epoch CSV; the seeded 357-site synthetic field if omitted.
        #[arg(long)]
        field: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        members: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (results do not depend on it).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Bracket correction terms of the uniform-weight estimator over a grid.
    Corrections {
        #[arg(long)]
        alphas: String,
        #[arg(long)]
        ns: String,
    },
    /// Writes the seeded 357-site synthetic field as `site_id,value`.
    Synth {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = synthetic::DEFAULT_SITES)]
        sites: usize,
    },
}

/// Where field statistics come from: one epoch, or first and second
/// moment files. Weights default to uniform.
#[derive(Debug, Args)]
pub struct FieldInput {
    #[arg(long, conflicts_with_all = ["mu", "second"], required_unless_present = "mu")]
    pub field: Option<PathBuf>,
    #[arg(long, requires = "second")]
    pub mu: Option<PathBuf>,
    #[arg(long, requires = "mu")]
    pub second: Option<PathBuf>,
    #[arg(long)]
    pub weights: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    SecondOrder,
    Uniform,
    LargeN,
    AlphaOne,
    AlphaNearOne,
    Epoch,
    EpochLargeN,
}

struct Loaded {
    epoch: Option<EpochField>,
    /// Present when moments were read from files; built on demand for an
    /// epoch, since the dense matrix is O(N²).
    stats: Option<FieldStats>,
    weights: Option<WeightVector>,
}

impl Loaded {
    fn n(&self) -> usize {
        match (&self.stats, &self.epoch) {
            (Some(s), _) => s.n(),
            (None, Some(e)) => e.len(),
            (None, None) => 0,
        }
    }

    fn stats(&self) -> FieldStats {
        match (&self.stats, &self.epoch) {
            (Some(s), _) => s.clone(),
            (None, Some(e)) => FieldStats::from_epoch(e),
            (None, None) => unreachable!("load always sets a source"),
        }
    }

    fn aggregates(&self) -> FieldAggregates {
        match (&self.stats, &self.epoch) {
            (Some(s), _) => FieldAggregates::from_stats(s),
            (None, Some(e)) => FieldAggregates::from_epoch(e),
            (None, None) => unreachable!("load always sets a source"),
        }
    }

    fn weights(&self) -> Result<WeightVector> {
        match &self.weights {
            Some(w) => Ok(w.clone()),
            None => WeightVector::uniform(self.n()),
        }
    }

    fn uniform_only(&self, what: &str) -> Result<()> {
        match &self.weights {
            Some(w) if !w.is_uniform() => Err(Error::invalid(format!(
                "{what} is defined for uniform weights only"
            ))),
            _ => Ok(()),
        }
    }

    fn epoch(&self, what: &str) -> Result<&EpochField> {
        self.epoch
            .as_ref()
            .ok_or_else(|| Error::invalid(format!("{what} needs --field")))
    }
}

fn load(input: &FieldInput, warn: &mut dyn Write) -> Result<Loaded> {
    let (epoch, stats) = match (&input.field, &input.mu, &input.second) {
        (Some(path), _, _) => (Some(ingest_epoch_csv(path)?), None),
        (None, Some(mu), Some(second)) => {
            let (s, warnings) = ingest_field_stats_csv(mu, second)?;
            for w in warnings {
                let _ = writeln!(warn, "warning: {w}");
            }
            (None, Some(s))
        }
        _ => return Err(Error::invalid("need --field or both --mu and --second")),
    };
    let mut data = Loaded {
        epoch,
        stats,
        weights: None,
    };
    if let Some(path) = &input.weights {
        let w = ingest_weights_csv(path)?;
        if w.len() != data.n() {
            return Err(Error::DimensionMismatch {
                expected: data.n(),
                found: w.len(),
            });
        }
        data.weights = Some(w);
    }
    Ok(data)
}

fn estimate(mode: Mode, rm: &ReportingModel, data: &Loaded) -> Result<VarianceEstimate> {
    let n = data.n();
    match mode {
        Mode::SecondOrder => {
            let ms = compute_moment_set(&data.weights()?, rm, &data.stats())?;
            Ok(estimators::variance_second_order(&ms))
        }
        Mode::Uniform => {
            data.uniform_only("uniform mode")?;
            estimators::variance_uniform_second_order(n, rm, &data.aggregates())
        }
        Mode::LargeN => estimators::variance_large_n(rm, &data.weights()?, &data.stats()),
        Mode::AlphaOne => estimators::variance_alpha_one(&data.weights()?, &data.stats()),
        Mode::AlphaNearOne => {
            data.uniform_only("alpha-near-one mode")?;
            estimators::variance_alpha_near_one(n, rm, &data.aggregates())
        }
        Mode::Epoch => {
            data.uniform_only("epoch mode")?;
            estimators::variance_single_epoch(rm, data.epoch("epoch mode")?)
        }
        Mode::EpochLargeN => {
            data.uniform_only("epoch-large-n mode")?;
            estimators::variance_single_epoch_large_n(rm, data.epoch("epoch-large-n mode")?)
        }
    }
}

enum Report {
    /// Single number, printed bare in CSV mode.
    Scalar(&'static str, Cell, Vec<(&'static str, Cell)>),
    Table(Table),
    Raw(Vec<u8>),
}

fn report(config: &RunConfig, warn: &mut dyn Write) -> Result<Report> {
    match &config.command {
        Command::Stirling { l, m: Some(m) } => Ok(Report::Scalar(
            "value",
            Cell::from(stirling2(*l, *m)?),
            vec![
                ("l", Cell::from(*l as usize)),
                ("m", Cell::from(*m as usize)),
            ],
        )),
        Command::Stirling { l, m: None } => {
            let table = StirlingTable::new(*l)?;
            let mut t = Table::new(&["l", "m", "value"]);
            for (k, v) in table.row(*l).iter().enumerate() {
                t.push(vec![
                    Cell::from(*l as usize),
                    Cell::from(k + 1),
                    Cell::from(*v),
                ]);
            }
            Ok(Report::Table(t))
        }
        Command::Moments { alpha, input } => {
            let rm = ReportingModel::new(*alpha)?;
            let data = load(input, warn)?;
            let ms = compute_moment_set(&data.weights()?, &rm, &data.stats())?;
            let mut t = Table::new(&["moment", "value"]);
            for (name, v) in ms.entries() {
                t.push(vec![Cell::from(name), Cell::from(v)]);
            }
            Ok(Report::Table(t))
        }
        Command::Variance { mode, alpha, input } => {
            let rm = ReportingModel::new(*alpha)?;
            let data = load(input, warn)?;
            let est = estimate(*mode, &rm, &data)?;
            Ok(Report::Scalar(
                "value",
                Cell::from(est.value),
                vec![
                    ("method", Cell::from(est.method.tag())),
                    ("negative", Cell::from(est.negative)),
                ],
            ))
        }
        Command::Check { alpha, n, weights } => {
            let rm = ReportingModel::new(*alpha)?;
            let w = match (weights, n) {
                (Some(path), _) => ingest_weights_csv(path)?,
                (None, Some(n)) => WeightVector::uniform(*n)?,
                (None, None) => return Err(Error::invalid("need --n or --weights")),
            };
            let r = convergence_report(&w, &rm);
            let mut t = Table::new(&[
                "alpha",
                "n",
                "ratio_margin",
                "hoeffding_tail",
                "sd_distance",
                "verdict",
            ]);
            t.push(vec![
                Cell::from(r.alpha),
                Cell::from(r.n),
                Cell::from(r.ratio_margin),
                Cell::from(r.hoeffding_tail),
                Cell::from(r.sd_distance),
                Cell::from(r.verdict.as_str()),
            ]);
            Ok(Report::Table(t))
        }
        Command::Simulate {
            alpha,
            field,
            weights,
            members,
            seed,
        } => {
            let rm = ReportingModel::new(*alpha)?;
            let ef = ingest_epoch_csv(field)?;
            let w = match weights {
                Some(p) => ingest_weights_csv(p)?,
                None => WeightVector::uniform(ef.len())?,
            };
            let r = simulate_epoch_ensemble(&ef, &w, &rm, *members, *seed)?;
            let mut t = Table::new(&[
                "mean_of_means",
                "ensemble_variance",
                "standard_error_of_variance",
                "n_members",
                "rejected_count",
            ]);
            t.push(vec![
                Cell::from(r.mean_of_means),
                Cell::from(r.ensemble_variance),
                Cell::from(r.standard_error_of_variance),
                Cell::from(r.n_members),
                Cell::from(r.rejected_count),
            ]);
            Ok(Report::Table(t))
        }
        Command::Sweep {
            alphas,
            ns,
            field,
            members,
            seed,
            workers,
        } => {
            let cfg = SweepConfig {
                alphas: parse_alpha_grid(alphas)?,
                ns: parse_n_grid(ns)?,
                members: *members,
                seed: *seed,
                workers: *workers,
            };
            let ef = match field {
                Some(p) => ingest_epoch_csv(p)?,
                None => synthetic::default_field(*seed),
            };
            let grid = relative_error_sweep(&ef, &cfg)?;
            match config.format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    grid.write_csv(&mut buf)?;
                    Ok(Report::Raw(buf))
                }
                Format::Jsonlines => {
                    let mut t = Table::new(&crate::montecarlo::CSV_HEADER);
                    for c in &grid.cells {
                        t.push(vec![
                            Cell::from(c.alpha),
                            Cell::from(c.n),
                            Cell::from(c.mc_variance),
                            Cell::from(c.formula_variance),
                            Cell::from(c.relative_error),
                            Cell::from(c.flag_gt_threshold),
                            Cell::from(c.mc_std_error),
                            Cell::from(c.degenerate),
                        ]);
                    }
                    Ok(Report::Table(t))
                }
            }
        }
        Command::Corrections { alphas, ns } => {
            let alphas = parse_alpha_grid(alphas)?;
            let ns = parse_n_grid(ns)?;
            let mut t = Table::new(&[
                "alpha", "n", "first_1", "first_2", "second_1", "second_2", "third_1", "third_2",
                "third_3",
            ]);
            for &a in &alphas {
                let rm = ReportingModel::new(a)?;
                for &n in &ns {
                    let c = estimators::correction_terms(n, &rm)?;
                    t.push(vec![
                        Cell::from(a),
                        Cell::from(n),
                        Cell::from(c.first[0]),
                        Cell::from(c.first[1]),
                        Cell::from(c.second[0]),
                        Cell::from(c.second[1]),
                        Cell::from(c.third[0]),
                        Cell::from(c.third[1]),
                        Cell::from(c.third_cubic),
                    ]);
                }
            }
            Ok(Report::Table(t))
        }
        Command::Synth { seed, sites } => {
            let spec = synthetic::SyntheticSpec {
                sites: *sites,
                ..Default::default()
            };
            let ef = synthetic::generate(&spec, *seed)?;
            let mut buf = Vec::new();
            write_epoch_csv(&ef, &mut buf)?;
            Ok(Report::Raw(buf))
        }
    }
}

fn emit(report: Report, format: Format, out: &mut dyn Write) -> Result<()> {
    let werr = |e: std::io::Error| Error::invalid(format!("write: {e}"));
    match (report, format) {
        (Report::Scalar(_, v, _), Format::Csv) => {
            let mut t = Table::new(&["v"]);
            t.push(vec![v]);
            let mut buf = Vec::new();
            t.write(Format::Csv, &mut buf)?;
            // drop the header line
            let text = String::from_utf8_lossy(&buf);
            out.write_all(text.split_once('\n').map_or("", |x| x.1).as_bytes())
                .map_err(werr)
        }
        (Report::Scalar(name, v, extra), Format::Jsonlines) => {
            let mut header: Vec<&'static str> = extra.iter().map(|e| e.0).collect();
            header.push(name);
            let mut row: Vec<Cell> = extra.into_iter().map(|e| e.1).collect();
            row.push(v);
            let mut t = Table::new(&header);
            t.push(row);
            t.write(Format::Jsonlines, out)
        }
        (Report::Table(t), f) => t.write(f, out),
        (Report::Raw(bytes), _) => out.write_all(&bytes).map_err(werr),
    }
}

/// Runs a parsed configuration, writing results to `--out` or `stdout` and
/// warnings to `warn`.
pub fn execute(config: &RunConfig, stdout: &mut dyn Write, warn: &mut dyn Write) -> Result<()> {
    let rep = report(config, warn)?;
    match &config.out {
        Some(path) => {
            let file = File::create(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            let mut w = BufWriter::new(file);
            emit(rep, config.format, &mut w)?;
            w.flush().map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })
        }
        None => emit(rep, config.format, stdout),
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses `args` (including the program name) and runs them, returning the
/// process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let text = e.to_string();
            let body = text.split("Usage:").next().unwrap_or("invalid arguments");
            let reason = one_line(body.trim_start_matches("error: "));
            let _ = writeln!(stderr, "error: kind=usage reason={reason}");
            return 1;
        }
    };
    match execute(&config, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(
                stderr,
                "error: kind={} reason={}",
                e.kind(),
                one_line(&e.to_string())
            );
            e.exit_code()
        }
    }
}
