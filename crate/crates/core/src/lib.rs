//! Variance estimators for spatial means built from randomly missing point
//! observations.
//!
//! A spatial mean over sites `i = 1..N` with weights `β_i` is the ratio
//!
//! ```text
//! r = R / S = Σ β_i s_i r_i / Σ β_i s_i
//! ```
//!
//! where each reporting indicator `s_i` is an independent Bernoulli(α) draw.
//! Because the denominator is random there is no exact closed form for the
//! variance of `r`; this crate evaluates truncated-series estimators of it
//! and validates them against exact enumeration and seeded Monte-Carlo
//! ensembles.
//!
//! Layout:
//!
//! - [`combinatorics`]: exact Stirling numbers of the second kind and
//!   falling factorials.
//! - [`moments`]: mixed moments `E S^l`, `E R S^l`, `E R² S^l` for general
//!   weights, their uniform-weight closed forms and large-N limits.
//! - [`estimators`]: the second-order variance formula and its uniform,
//!   large-N, `α = 1`, `α → 1` and single-epoch reductions.
//! - [`convergence`]: ratio condition, Hoeffding tail bound and the
//!   standard-deviation distance heuristic.
//! - [`montecarlo`]: counter-based ensemble simulation, exact mask
//!   enumeration oracles and the relative-error sweep.
//! - [`cli`]: the command-line front end and its CSV / JSON-lines formats.

pub mod cli;
pub mod combinatorics;
pub mod convergence;
pub mod error;
pub mod estimators;
pub mod moments;
pub mod montecarlo;
pub mod summation;
pub mod synthetic;

pub use error::{Error, Result};
pub use estimators::{EpochField, Method, VarianceEstimate};
pub use moments::{FieldAggregates, FieldStats, MomentSet, ReportingModel, WeightVector};
