//! Uniform-weight moments as polynomials in `α` with Stirling-number
//! coefficients.
//!
//! With `β_i = 1/N` the coefficient of `α^m` in `E S^l` is
//! `{l over m} · N!/(N−m)! / N^l`. Falling-factorial ratios are formed as
//! products of `(1 − k/N)` so that nothing overflows at large `N`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::combinatorics::{stirling2, STIRLING_CAP};
use crate::error::{Error, Result};
use crate::summation::DoubleDouble;

use super::types::{FieldAggregates, ReportingModel};

fn check_order(top: u32, what: &str) -> Result<()> {
    if top > STIRLING_CAP {
        return Err(Error::domain(format!(
            "{what} needs Stirling row {top}, above the cap of {STIRLING_CAP}"
        )));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("site count must be at least 1"));
    }
    Ok(())
}

/// `Π_{k=from}^{to-1} (1 − k/N) · N^power`, in double-double.
fn scaled_falling_ratio(n: usize, from: u32, to: u32, power: i32) -> DoubleDouble {
    let nf = n as f64;
    let mut acc = DoubleDouble::new(1.0);
    for k in from..to {
        acc = acc * (nf - f64::from(k)) / nf;
    }
    for _ in 0..power.unsigned_abs() {
        acc = if power > 0 { acc * nf } else { acc / nf };
    }
    acc
}

fn evaluate(coefficients: &[DoubleDouble], alpha: f64) -> DoubleDouble {
    let mut power = DoubleDouble::new(1.0);
    let mut acc = DoubleDouble::default();
    for &c in coefficients {
        power = power * alpha;
        acc = acc + c * power;
    }
    acc
}

fn s_terms(l: u32, n: usize) -> Result<Vec<DoubleDouble>> {
    check_n(n)?;
    if l == 0 {
        return Err(Error::domain("E S^l closed form needs l >= 1"));
    }
    check_order(l, "E S^l")?;
    (1..=l.min(n as u32))
        .map(|m| {
            // N!/(N−m)!/N^l = Π_{k<m}(1 − k/N) · N^{m−l}
            let s = stirling2(l, m)? as f64;
            Ok(s * scaled_falling_ratio(n, 0, m, m as i32 - l as i32))
        })
        .collect()
}

fn rs_terms(l: u32, n: usize) -> Result<Vec<DoubleDouble>> {
    check_n(n)?;
    check_order(l + 1, "E R S^l")?;
    (1..=(l + 1).min(n as u32))
        .map(|m| {
            // (N−1)!/(N−m)!/N^{l+1} = Π_{1≤k<m}(1 − k/N) · N^{m−l−2}
            let s = stirling2(l + 1, m)? as f64;
            Ok(s * scaled_falling_ratio(n, 1, m, m as i32 - l as i32 - 2))
        })
        .collect()
}

fn r2s_diagonal_terms(l: u32, n: usize) -> Result<Vec<DoubleDouble>> {
    check_n(n)?;
    check_order(l + 1, "E R² S^l")?;
    (1..=(l + 1).min(n as u32))
        .map(|m| {
            let s = stirling2(l + 1, m)? as f64;
            Ok(s * scaled_falling_ratio(n, 1, m, m as i32 - l as i32 - 3))
        })
        .collect()
}

fn r2s_cross_terms(l: u32, n: usize) -> Result<Vec<DoubleDouble>> {
    if n < 2 {
        return Err(Error::domain(
            "E R² S^l closed form needs N >= 2 (no off-diagonal pairs otherwise)",
        ));
    }
    check_order(l + 2, "E R² S^l")?;
    let mut out = vec![DoubleDouble::default()];
    for m in 2..=(l + 2).min(n as u32) {
        let diff = stirling2(l + 2, m)? - stirling2(l + 1, m)?;
        // (N−2)!/(N−m)!/N^{l+2} = Π_{2≤k<m}(1 − k/N) · N^{m−l−4}
        out.push(diff as f64 * scaled_falling_ratio(n, 2, m, m as i32 - l as i32 - 4));
    }
    Ok(out)
}

fn rounded(terms: Result<Vec<DoubleDouble>>) -> Result<Vec<f64>> {
    Ok(terms?.into_iter().map(DoubleDouble::value).collect())
}

/// Coefficients of `α^1 … α^{min(l,N)}` in uniform-weight `E S^l`.
pub fn s_coefficients(l: u32, n: usize) -> Result<Vec<f64>> {
    rounded(s_terms(l, n))
}

/// Coefficients of `Σ E r_i · α^m` in uniform-weight `E R S^l`.
pub fn rs_coefficients(l: u32, n: usize) -> Result<Vec<f64>> {
    rounded(rs_terms(l, n))
}

/// Coefficients `a_m` of `Σ E r_i² · α^m` in uniform-weight `E R² S^l`.
pub fn r2s_diagonal_coefficients(l: u32, n: usize) -> Result<Vec<f64>> {
    rounded(r2s_diagonal_terms(l, n))
}

/// Coefficients `b_m` of `Σ_{i≠j} E r_i r_j · α^m` in uniform-weight
/// `E R² S^l`. The `m = 1` entry is always zero.
pub fn r2s_cross_coefficients(l: u32, n: usize) -> Result<Vec<f64>> {
    rounded(r2s_cross_terms(l, n))
}

/// `E S^l` for uniform weights, any `1 ≤ l ≤ 25`.
pub fn moment_s_uniform(l: u32, n: usize, rm: &ReportingModel) -> Result<f64> {
    Ok(evaluate(&s_terms(l, n)?, rm.alpha()).value())
}

/// `E R S^l` for uniform weights, any `0 ≤ l ≤ 24`.
pub fn moment_rs_uniform(
    l: u32,
    n: usize,
    rm: &ReportingModel,
    agg: &FieldAggregates,
) -> Result<f64> {
    check_aggregates(n, agg)?;
    Ok((agg.sum_mu * evaluate(&rs_terms(l, n)?, rm.alpha())).value())
}

/// `E R² S^l` for uniform weights, any `0 ≤ l ≤ 23`, `N ≥ 2`.
pub fn moment_r2s_uniform(
    l: u32,
    n: usize,
    rm: &ReportingModel,
    agg: &FieldAggregates,
) -> Result<f64> {
    check_aggregates(n, agg)?;
    let cross = r2s_cross_terms(l, n)?;
    let diag = r2s_diagonal_terms(l, n)?;
    let a = rm.alpha();
    Ok((agg.sum_sq * evaluate(&diag, a) + agg.sum_cross * evaluate(&cross, a)).value())
}

fn check_aggregates(n: usize, agg: &FieldAggregates) -> Result<()> {
    if agg.n != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: agg.n,
        });
    }
    Ok(())
}

fn big(v: u128) -> BigInt {
    BigInt::from(v)
}

/// `x!/(x−k)!` as an exact rational, allowing `k = x + 1` (i.e. `1/(x+1)`
/// from the `(N−2)!/(N−1)!` corner case).
fn falling_rational(x: i64, k: i64) -> BigRational {
    if k < 0 {
        // x!/(x−k)! with negative k is 1/((x+1)(x+2)…(x−k))
        let denom: BigInt = ((x + 1)..=(x - k)).map(BigInt::from).product();
        return BigRational::new(BigInt::one(), denom);
    }
    if k > x {
        return BigRational::zero();
    }
    let num: BigInt = ((x - k + 1)..=x).map(BigInt::from).product();
    BigRational::from_integer(num)
}

/// Verifies, in exact rational arithmetic,
/// `N·a_m + N(N−1)·b_m = {l+2 over m} · N!/(N−m)! / N^{l+2}`
/// where `a_m` and `b_m` are the diagonal and cross coefficients of
/// `α^m` in `E R² S^l`.
pub fn coefficient_identity_check(l: u32, m: u32, n: u32) -> bool {
    if n < 2 || m == 0 || l + 2 > STIRLING_CAP {
        return false;
    }
    let (Ok(s1), Ok(s2)) = (stirling2(l + 1, m), stirling2(l + 2, m)) else {
        return false;
    };
    let ni = i64::from(n);
    let mi = i64::from(m);
    let n_pow = BigRational::from_integer(BigInt::from(n).pow(l + 2));
    // a_m = {l+1 over m} (N−1)!/(N−m)! / N^{l+2}
    let a = BigRational::from_integer(big(s1)) * falling_rational(ni - 1, mi - 1) / &n_pow;
    // b_m = ({l+2 over m} − {l+1 over m}) (N−2)!/(N−m)! / N^{l+2}
    let b =
        BigRational::from_integer(big(s2) - big(s1)) * falling_rational(ni - 2, mi - 2) / &n_pow;
    let lhs = BigRational::from_integer(BigInt::from(n)) * a
        + BigRational::from_integer(BigInt::from(n) * BigInt::from(n - 1)) * b;
    let rhs = BigRational::from_integer(big(s2)) * falling_rational(ni, mi) / n_pow;
    lhs == rhs
}
