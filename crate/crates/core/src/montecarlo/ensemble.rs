//! Seeded ensembles of reporting masks applied to one epoch.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::EpochField;
use crate::moments::{ReportingModel, WeightVector};
use crate::summation::{self, Neumaier};

use super::stream::{Domain, Stream};

/// Largest tolerated probability that a mask is empty before rejection
/// sampling is refused.
pub const MAX_EMPTY_PROBABILITY: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleResult {
    pub mean_of_means: f64,
    /// Unbiased (`n − 1`) sample variance of the member spatial means.
    pub ensemble_variance: f64,
    /// Jackknife standard error of `ensemble_variance`; NaN for two members.
    pub standard_error_of_variance: f64,
    pub n_members: usize,
    /// All-zero masks that were redrawn.
    pub rejected_count: u64,
}

/// `P(S = 0) = (1−α)^{N_eff}` over the sites with positive weight.
pub fn empty_mask_probability(w: &WeightVector, rm: &ReportingModel) -> f64 {
    (1.0 - rm.alpha()).powi(w.support() as i32)
}

pub(crate) fn check_feasible(w: &WeightVector, rm: &ReportingModel) -> Result<()> {
    let p_empty = empty_mask_probability(w, rm);
    if p_empty > MAX_EMPTY_PROBABILITY {
        return Err(Error::Infeasible { p_empty });
    }
    Ok(())
}

/// Spatial mean of one member and the number of empty masks redrawn.
fn draw_member(root: &Stream, member: u64, values: &[f64], beta: &[f64], alpha: f64) -> (f64, u64) {
    let shift = values[0];
    let member_stream = root.substream(member);
    let mut attempt = 0u64;
    loop {
        let s = member_stream.substream(attempt);
        let mut num = Neumaier::new();
        let mut den = Neumaier::new();
        for (i, (&r, &b)) in values.iter().zip(beta).enumerate() {
            if b > 0.0 && s.bernoulli(i as u64, alpha) {
                num += b * (r - shift);
                den += b;
            }
        }
        let den = den.value();
        if den > 0.0 {
            return (shift + num.value() / den, attempt);
        }
        attempt += 1;
    }
}

/// Simulates `n_members` masks, each conditioned on at least one reporting
/// site, and summarizes the spatial means. The result depends only on the
/// inputs and `seed`, never on the number of worker threads.
pub fn simulate_epoch_ensemble(
    ef: &EpochField,
    w: &WeightVector,
    rm: &ReportingModel,
    n_members: usize,
    seed: u64,
) -> Result<EnsembleResult> {
    if w.len() != ef.len() {
        return Err(Error::DimensionMismatch {
            expected: ef.len(),
            found: w.len(),
        });
    }
    if n_members < 2 {
        return Err(Error::invalid(format!(
            "ensemble needs at least 2 members, got {n_members}"
        )));
    }
    check_feasible(w, rm)?;

    let root = Stream::new(seed, Domain::Ensemble);
    let values = ef.values();
    let beta = w.as_slice();
    let alpha = rm.alpha();
    let draws: Vec<(f64, u64)> = (0..n_members as u64)
        .into_par_iter()
        .map(|m| draw_member(&root, m, values, beta, alpha))
        .collect();

    let rejected_count = draws.iter().map(|d| d.1).sum();
    let means: Vec<f64> = draws.into_iter().map(|d| d.0).collect();
    let (mean_of_means, ensemble_variance, standard_error_of_variance) = summarize(&means);
    Ok(EnsembleResult {
        mean_of_means,
        ensemble_variance,
        standard_error_of_variance,
        n_members,
        rejected_count,
    })
}

/// Mean, unbiased variance and its jackknife standard error, in fixed order.
pub(crate) fn summarize(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len();
    let nf = n as f64;
    let shift = xs[0];
    let mean_d = summation::sum(xs.iter().map(|x| x - shift)) / nf;
    let dev: Vec<f64> = xs.iter().map(|x| x - shift - mean_d).collect();
    let ss = summation::sum(dev.iter().map(|d| d * d));
    let var = ss / (nf - 1.0);
    if n < 3 {
        return (shift + mean_d, var, f64::NAN);
    }
    // leave-one-out variances: ((n−1)s² − n/(n−1)·d_i²)/(n−2)
    let loo: Vec<f64> = dev
        .iter()
        .map(|d| (ss - nf / (nf - 1.0) * d * d) / (nf - 2.0))
        .collect();
    let loo_mean = summation::sum(loo.iter().copied()) / nf;
    let spread = summation::sum(loo.iter().map(|v| (v - loo_mean).powi(2)));
    (shift + mean_d, var, ((nf - 1.0) / nf * spread).sqrt())
}

/// Fraction of `n_masks` unconditioned masks with `S ≥ 2α`.
pub fn empirical_tail_frequency(
    w: &WeightVector,
    rm: &ReportingModel,
    n_masks: usize,
    seed: u64,
) -> f64 {
    let root = Stream::new(seed, Domain::Tail);
    let beta = w.as_slice();
    let alpha = rm.alpha();
    let threshold = 2.0 * alpha - 1e-12;
    let hits: u64 = (0..n_masks as u64)
        .into_par_iter()
        .map(|m| {
            let s = root.substream(m);
            let total = summation::sum(
                beta.iter()
                    .enumerate()
                    .filter(|(i, _)| s.bernoulli(*i as u64, alpha))
                    .map(|(_, b)| *b),
            );
            u64::from(total >= threshold)
        })
        .sum();
    hits as f64 / n_masks as f64
}
