//! Truncated-series variance estimators for the spatial mean.
//!
//! The general estimator expands `R/S` to second order about
//! `(E R, E S)` and takes expectations, producing a rational function of the
//! nine moments in a [`MomentSet`]. The remaining estimators are its
//! reductions for uniform weights, large `N`, `α = 1`, `α → 1`, and a single
//! snapshot of the field.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::moments::{self, FieldAggregates, FieldStats, MomentSet, ReportingModel, WeightVector};
use crate::summation::{self, DoubleDouble, Neumaier};

/// One snapshot of site values.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochField {
    values: Vec<f64>,
}

impl EpochField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("epoch field needs at least one site"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "epoch field value at site {i} is not finite: {}",
                values[i]
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Population variance `(1/N) Σ r_i² − ((1/N) Σ r_i)²`, evaluated about
    /// the first value so that a constant field gives exactly zero.
    pub fn spatial_variance(&self) -> f64 {
        let shift = self.values[0];
        let n = self.values.len() as f64;
        let mean = summation::sum(self.values.iter().map(|v| v - shift)) / n;
        summation::sum(self.values.iter().map(|v| {
            let d = v - shift - mean;
            d * d
        })) / n
    }

    /// Subset of sites, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let values = indices
            .iter()
            .map(|&i| {
                self.values.get(i).copied().ok_or_else(|| {
                    Error::invalid(format!("site index {i} outside field of {}", self.len()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }
}

/// Which formula produced a [`VarianceEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    SecondOrder,
    UniformSecondOrder,
    LargeN,
    AlphaOne,
    AlphaNearOne,
    SingleEpoch,
    SingleEpochLargeN,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::SecondOrder,
        Method::UniformSecondOrder,
        Method::LargeN,
        Method::AlphaOne,
        Method::AlphaNearOne,
        Method::SingleEpoch,
        Method::SingleEpochLargeN,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::SecondOrder => "second-order",
            Method::UniformSecondOrder => "uniform",
            Method::LargeN => "large-n",
            Method::AlphaOne => "alpha-one",
            Method::AlphaNearOne => "alpha-near-one",
            Method::SingleEpoch => "epoch",
            Method::SingleEpochLargeN => "epoch-large-n",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| Error::invalid(format!("unknown variance method '{s}'")))
    }
}

/// The `1/N`, `1/N²` (and for the third bracket `1/N³`) terms of the three
/// brackets in the uniform-weight second-order formula. Each bracket is
/// `1 + first + second (+ third_cubic)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionTerms {
    /// Multiplies `Σ E r_i²`: `[order 1/N, order 1/N²]`.
    pub first: [f64; 2],
    /// Multiplies `Σ_{i≠j} E r_i r_j`.
    pub second: [f64; 2],
    /// Multiplies `(Σ E r_i / N)²`.
    pub third: [f64; 2],
    pub third_cubic: f64,
}

impl CorrectionTerms {
    pub fn first_bracket(&self) -> f64 {
        1.0 + self.first[0] + self.first[1]
    }

    pub fn second_bracket(&self) -> f64 {
        1.0 + self.second[0] + self.second[1]
    }

    pub fn third_bracket(&self) -> f64 {
        1.0 + self.third[0] + self.third[1] + self.third_cubic
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceEstimate {
    pub value: f64,
    pub method: Method,
    pub correction_profile: Option<CorrectionTerms>,
    /// Set when a truncated series came out below zero.
    pub negative: bool,
}

impl VarianceEstimate {
    fn new(value: f64, method: Method) -> Self {
        Self {
            value,
            method,
            correction_profile: None,
            negative: value < 0.0,
        }
    }
}

/// Second-order variance from the nine mixed moments, term by term, in
/// double-double arithmetic.
pub fn variance_second_order(ms: &MomentSet) -> VarianceEstimate {
    let d = DoubleDouble::new;
    let es = d(ms.es1);
    let er = d(ms.ers0);
    let er_sq = er * er;
    let es2 = es * es;
    let es3 = es2 * es;
    let es4 = es2 * es2;
    let es5 = es4 * es;
    let es6 = es3 * es3;
    let (m2, m3, m4) = (d(ms.es2), d(ms.es3), d(ms.es4));
    let (rs1, rs2) = (d(ms.ers1), d(ms.ers2));
    let (r2s0, r2s1, r2s2) = (d(ms.er2s0), d(ms.er2s1), d(ms.er2s2));

    let terms = [
        -6.0 * er_sq / es2,
        4.0 * r2s0 / es2,
        10.0 * er_sq * m2 / es4,
        -(rs1 * rs1) / es4,
        -(er_sq * m2 * m2) / es6,
        2.0 * er * rs2 / es4,
        -4.0 * r2s1 / es3,
        -6.0 * er_sq * m3 / es5,
        er_sq * m4 / es6,
        r2s2 / es4,
        2.0 * er * rs1 / es3 * (m2 / es2 - 1.0),
    ];
    VarianceEstimate::new(DoubleDouble::sum(terms).value(), Method::SecondOrder)
}

/// Bracket corrections of the uniform-weight formula.
pub fn correction_terms(n: usize, rm: &ReportingModel) -> Result<CorrectionTerms> {
    if n == 0 {
        return Err(Error::domain("site count must be at least 1"));
    }
    let a = rm.alpha();
    let k = rm.odds_deficit();
    let nf = n as f64;
    let n2 = nf * nf;
    // adding 0.0 turns −0 into +0
    Ok(CorrectionTerms {
        first: [k / nf + 0.0, k * (2.0 * a - 1.0) / a / n2 + 0.0],
        second: [3.0 * k / nf + 0.0, k * (6.0 * a - 4.0) / a / n2 + 0.0],
        third: [2.0 * k / nf + 0.0, -3.0 * k * k / n2 + 0.0],
        third_cubic: (6.0 * k * k + k / (a * a)) / (n2 * nf) + 0.0,
    })
}

fn check_sites(n: usize, agg: &FieldAggregates) -> Result<()> {
    if agg.n != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: agg.n,
        });
    }
    if n < 2 {
        return Err(Error::domain("this estimator needs N >= 2"));
    }
    Ok(())
}

/// Second-order variance for uniform weights, from field sums alone.
pub fn variance_uniform_second_order(
    n: usize,
    rm: &ReportingModel,
    agg: &FieldAggregates,
) -> Result<VarianceEstimate> {
    check_sites(n, agg)?;
    let c = correction_terms(n, rm)?;
    let d = DoubleDouble::new;
    let nf = d(n as f64);
    let n2 = nf * nf;
    let mean = d(agg.sum_mu) / nf;
    let value = d(c.first_bracket()) * agg.sum_sq / (rm.alpha() * n2)
        + d(c.second_bracket()) * agg.sum_cross / n2
        - d(c.third_bracket()) * mean * mean;
    let value = value.value();
    let mut est = VarianceEstimate::new(value, Method::UniformSecondOrder);
    est.correction_profile = Some(c);
    Ok(est)
}

/// `σ_R² / α²` with general weights.
pub fn variance_large_n(
    rm: &ReportingModel,
    w: &WeightVector,
    f: &FieldStats,
) -> Result<VarianceEstimate> {
    let er = moments::moment_rs(0, w, rm, f)?;
    let er2 = moments::moment_r2s(0, w, rm, f)?;
    let a = rm.alpha();
    Ok(VarianceEstimate::new(
        summation::sum([er2, -er * er]) / (a * a),
        Method::LargeN,
    ))
}

/// `σ_R² / α²` with uniform weights, from field sums alone.
pub fn variance_large_n_uniform(
    rm: &ReportingModel,
    agg: &FieldAggregates,
) -> Result<VarianceEstimate> {
    if agg.n == 0 {
        return Err(Error::domain("site count must be at least 1"));
    }
    let er = moments::mean_r_uniform(rm, agg);
    let er2 = moments::mean_r2_uniform(rm, agg);
    let a = rm.alpha();
    Ok(VarianceEstimate::new(
        summation::sum([er2, -er * er]) / (a * a),
        Method::LargeN,
    ))
}

/// `βᵀ Σ β` with `Σ` the covariance of the field.
pub fn variance_alpha_one(w: &WeightVector, f: &FieldStats) -> Result<VarianceEstimate> {
    let n = w.len();
    if f.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.n(),
        });
    }
    let beta = w.as_slice();
    let mu = f.mu();
    let mut acc = Neumaier::new();
    for i in 0..n {
        for j in 0..n {
            acc += beta[i] * beta[j] * (f.second(i, j) - mu[i] * mu[j]);
        }
    }
    Ok(VarianceEstimate::new(acc.value(), Method::AlphaOne))
}

/// First term of each bracket only: point variances inflated by `1/α` plus
/// a `(1−α)/α` correction on squared point means.
pub fn variance_alpha_near_one(
    n: usize,
    rm: &ReportingModel,
    agg: &FieldAggregates,
) -> Result<VarianceEstimate> {
    check_sites(n, agg)?;
    let a = rm.alpha();
    let n2 = (n as f64).powi(2);
    let value = summation::sum([
        agg.sum_variance() / (a * n2),
        agg.sum_covariance() / n2,
        (1.0 - a) / a * agg.sum_mu_sq / n2,
    ]);
    Ok(VarianceEstimate::new(value, Method::AlphaNearOne))
}

/// Single-snapshot form of the uniform second-order formula, with its
/// polynomials in `1/N` against `Σ r_i²` and `Σ_{i≠j} r_i r_j`.
pub fn variance_single_epoch(rm: &ReportingModel, ef: &EpochField) -> Result<VarianceEstimate> {
    let n = ef.len();
    if n < 2 {
        return Err(Error::domain(
            "single-epoch variance needs N >= 2 (the cross-site sum is empty)",
        ));
    }
    let a = rm.alpha();
    let a2 = a * a;
    let nf = n as f64;
    let lead = (1.0 - a) / a;
    let agg = FieldAggregates::from_epoch(ef);
    let q = 6.0 * a2 - 6.0 * a + 1.0;
    let diag_bracket = summation::sum([
        1.0,
        (2.0 * a - 1.0) / (a * nf),
        -(a2 + a - 1.0) / (a2 * nf * nf),
        q / (a2 * nf.powi(3)),
    ]);
    let cross_bracket = summation::sum([1.0, (7.0 * a - 5.0) / (a * nf), -q / (a2 * nf * nf)]);
    let value = summation::sum([
        lead / (nf * nf) * diag_bracket * agg.sum_sq,
        -lead / nf.powi(3) * cross_bracket * agg.sum_cross,
    ]);
    Ok(VarianceEstimate::new(value, Method::SingleEpoch))
}

/// `((1−α)/α) σ_s² / N` with `σ_s²` the population spatial variance.
pub fn variance_single_epoch_large_n(
    rm: &ReportingModel,
    ef: &EpochField,
) -> Result<VarianceEstimate> {
    let a = rm.alpha();
    let value = (1.0 - a) / a * ef.spatial_variance() / ef.len() as f64;
    Ok(VarianceEstimate::new(value, Method::SingleEpochLargeN))
}
