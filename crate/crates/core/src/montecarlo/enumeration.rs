//! Exact oracles by summing over every reporting mask.

use crate::error::{Error, Result};
use crate::estimators::EpochField;
use crate::moments::{FieldStats, ReportingModel, WeightVector};
use crate::summation::Neumaier;

/// Site cap for the conditional oracles (2^20 masks).
pub const EPOCH_ENUMERATION_CAP: usize = 20;
/// Site cap for the field oracles, which cost O(2^N N²).
pub const FIELD_ENUMERATION_CAP: usize = 14;
/// Site cap for the unconditional moment oracle.
pub const MOMENT_ENUMERATION_CAP: usize = 12;

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::domain(format!(
            "enumeration over 2^{n} masks exceeds the cap of {cap} sites"
        )));
    }
    Ok(())
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `P(mask)` indexed by popcount.
fn mask_probabilities(n: usize, alpha: f64) -> Vec<f64> {
    (0..=n)
        .map(|k| alpha.powi(k as i32) * (1.0 - alpha).powi((n - k) as i32))
        .collect()
}

/// `P(S > 0) = 1 − (1−α)^{N_eff}`, accurate for small `α`.
fn nonempty_probability(w: &WeightVector, alpha: f64) -> f64 {
    -((w.support() as f64) * (-alpha).ln_1p()).exp_m1()
}

fn masks(n: usize) -> impl Iterator<Item = u32> {
    1..(1u32 << n)
}

fn bits(mask: u32, n: usize) -> impl Iterator<Item = usize> {
    (0..n).filter(move |i| mask & (1 << i) != 0)
}

/// Exact `(E f, Var f)` of the spatial mean of one epoch, conditional on
/// at least one positively weighted site reporting.
pub fn exact_enumeration_epoch(
    ef: &EpochField,
    w: &WeightVector,
    rm: &ReportingModel,
) -> Result<(f64, f64)> {
    let n = ef.len();
    check_dims(n, w.len())?;
    check_cap(n, EPOCH_ENUMERATION_CAP)?;
    let r = ef.values();
    let beta = w.as_slice();
    let shift = r[0];
    let prob = mask_probabilities(n, rm.alpha());

    let mut outcomes = Vec::with_capacity((1usize << n) - 1);
    for mask in masks(n) {
        let mut num = Neumaier::new();
        let mut den = Neumaier::new();
        for i in bits(mask, n) {
            num += beta[i] * (r[i] - shift);
            den += beta[i];
        }
        let den = den.value();
        if den > 0.0 {
            outcomes.push((prob[mask.count_ones() as usize], num.value() / den));
        }
    }
    let total = nonempty_probability(w, rm.alpha());
    let mean: f64 = outcomes
        .iter()
        .map(|(p, f)| p * f)
        .sum::<Neumaier>()
        .value()
        / total;
    let var = outcomes
        .iter()
        .map(|(p, f)| p * (f - mean).powi(2))
        .sum::<Neumaier>()
        .value()
        / total;
    Ok((shift + mean, var))
}

/// Exact `(E f, Var f)` of the spatial mean when the field itself is random
/// with the given first and second moments, conditional on `S > 0`.
pub fn exact_enumeration_field(
    w: &WeightVector,
    rm: &ReportingModel,
    f: &FieldStats,
) -> Result<(f64, f64)> {
    let n = f.n();
    check_dims(w.len(), n)?;
    check_cap(n, FIELD_ENUMERATION_CAP)?;
    let beta = w.as_slice();
    let mu = f.mu();
    let prob = mask_probabilities(n, rm.alpha());
    let mut first = Neumaier::new();
    let mut second = Neumaier::new();
    for mask in masks(n) {
        let s: f64 = bits(mask, n).map(|i| beta[i]).sum::<Neumaier>().value();
        if s <= 0.0 {
            continue;
        }
        let p = prob[mask.count_ones() as usize];
        let r: f64 = bits(mask, n)
            .map(|i| beta[i] * mu[i])
            .sum::<Neumaier>()
            .value();
        let r2: f64 = bits(mask, n)
            .flat_map(|i| bits(mask, n).map(move |j| (i, j)))
            .map(|(i, j)| beta[i] * beta[j] * f.second(i, j))
            .sum::<Neumaier>()
            .value();
        first += p * r / s;
        second += p * r2 / (s * s);
    }
    let total = nonempty_probability(w, rm.alpha());
    let mean = first.value() / total;
    Ok((mean, second.value() / total - mean * mean))
}

/// Unconditional `(E S^l, E R S^l, E R² S^l)` over all `2^N` masks,
/// including the empty one (with `0⁰ = 1`).
pub fn exact_moment_enumeration(
    w: &WeightVector,
    rm: &ReportingModel,
    f: &FieldStats,
    l: u32,
) -> Result<(f64, f64, f64)> {
    let n = f.n();
    check_dims(w.len(), n)?;
    check_cap(n, MOMENT_ENUMERATION_CAP)?;
    let beta = w.as_slice();
    let mu = f.mu();
    let prob = mask_probabilities(n, rm.alpha());
    let mut es = Neumaier::new();
    let mut ers = Neumaier::new();
    let mut er2s = Neumaier::new();
    for mask in 0..(1u32 << n) {
        let p = prob[mask.count_ones() as usize];
        if p == 0.0 {
            continue;
        }
        let s: f64 = bits(mask, n).map(|i| beta[i]).sum::<Neumaier>().value();
        let sl = s.powi(l as i32);
        let r: f64 = bits(mask, n)
            .map(|i| beta[i] * mu[i])
            .sum::<Neumaier>()
            .value();
        let r2: f64 = bits(mask, n)
            .flat_map(|i| bits(mask, n).map(move |j| (i, j)))
            .map(|(i, j)| beta[i] * beta[j] * f.second(i, j))
            .sum::<Neumaier>()
            .value();
        es += p * sl;
        ers += p * r * sl;
        er2s += p * r2 * sl;
    }
    Ok((es.value(), ers.value(), er2s.value()))
}
