//! Large-N limits of the uniform-weight moments.
//!
//! When `l ≪ N` only the highest power of `α` survives in each Stirling
//! polynomial, so the moments of `R` and `S` factorize:
//! `E S^l ≈ α^l`, `E R S^l ≈ E R · α^l`, `E R² S^l ≈ E R² · α^l`.

use crate::combinatorics::STIRLING_CAP;
use crate::error::{Error, Result};
use crate::summation;

use super::types::{FieldAggregates, ReportingModel};

/// `E R` for uniform weights.
pub fn mean_r_uniform(rm: &ReportingModel, agg: &FieldAggregates) -> f64 {
    rm.alpha() * agg.sum_mu / agg.n as f64
}

/// `E R²` for uniform weights.
pub fn mean_r2_uniform(rm: &ReportingModel, agg: &FieldAggregates) -> f64 {
    let a = rm.alpha();
    let n2 = (agg.n as f64).powi(2);
    summation::sum([a * agg.sum_sq / n2, a * a * agg.sum_cross / n2])
}

/// `(E S^l, E R S^l, E R² S^l)` in the large-N limit.
pub fn moments_large_n(
    l: u32,
    rm: &ReportingModel,
    agg: &FieldAggregates,
) -> Result<(f64, f64, f64)> {
    if l + 2 > STIRLING_CAP {
        return Err(Error::domain(format!(
            "large-N moments follow the Stirling cap: need l <= {}, got {l}",
            STIRLING_CAP - 2
        )));
    }
    if agg.n == 0 {
        return Err(Error::domain("site count must be at least 1"));
    }
    let al = rm.alpha().powi(l as i32);
    Ok((
        al,
        mean_r_uniform(rm, agg) * al,
        mean_r2_uniform(rm, agg) * al,
    ))
}
