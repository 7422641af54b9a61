use crate::error::{Error, Result};
use crate::estimators::EpochField;
use crate::summation::{self, Neumaier};

const WEIGHT_SUM_RENORMALIZE: f64 = 1e-6;
const WEIGHT_UNIFORM_TOL: f64 = 1e-12;
const STRICT_SYMMETRY_TOL: f64 = 1e-12;
const LENIENT_SYMMETRY_TOL: f64 = 1e-9;
const PSD_TOL: f64 = 1e-9;
const DIAGONAL_TOL: f64 = 1e-12;

/// Per-site averaging weights `β_i`, nonnegative and summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    beta: Vec<f64>,
}

impl WeightVector {
    /// Accepts weights whose sum is within `1e-6` of one and rescales them
    /// to sum to one; anything further off is rejected.
    pub fn new(beta: Vec<f64>) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::invalid("weight vector must have at least one site"));
        }
        if let Some((i, b)) = beta
            .iter()
            .enumerate()
            .find(|(_, b)| !b.is_finite() || **b < 0.0)
        {
            return Err(Error::invalid(format!(
                "weight {i} is {b}; weights must be finite and nonnegative"
            )));
        }
        let total = summation::sum(beta.iter().copied());
        if (total - 1.0).abs() > WEIGHT_SUM_RENORMALIZE {
            return Err(Error::invalid(format!(
                "weights sum to {total}, expected 1 within {WEIGHT_SUM_RENORMALIZE}"
            )));
        }
        Ok(Self::rescaled(beta, total))
    }

    /// Scales arbitrary nonnegative weights (areas, station densities…) so
    /// they sum to one.
    pub fn normalized(raw: Vec<f64>) -> Result<Self> {
        if raw.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::invalid("weights must be finite and nonnegative"));
        }
        let total = summation::sum(raw.iter().copied());
        if total <= 0.0 {
            return Err(Error::invalid("weights must have a positive sum"));
        }
        Ok(Self::rescaled(raw, total))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("weight vector must have at least one site"));
        }
        Ok(Self {
            beta: vec![1.0 / n as f64; n],
        })
    }

    fn rescaled(mut beta: Vec<f64>, total: f64) -> Self {
        if total != 1.0 {
            beta.iter_mut().for_each(|b| *b /= total);
        }
        Self { beta }
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.beta
    }

    /// All weights equal within `1e-12`.
    pub fn is_uniform(&self) -> bool {
        let first = self.beta[0];
        self.beta
            .iter()
            .all(|b| (b - first).abs() <= WEIGHT_UNIFORM_TOL)
    }

    /// `Σ β_i^k`.
    pub fn power_sum(&self, k: i32) -> f64 {
        summation::sum(self.beta.iter().map(|b| b.powi(k)))
    }

    /// Number of sites with strictly positive weight.
    pub fn support(&self) -> usize {
        self.beta.iter().filter(|b| **b > 0.0).count()
    }
}

/// Probability `α ∈ (0, 1]` that any given site reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportingModel {
    alpha: f64,
}

impl ReportingModel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::domain(format!(
                "reporting probability must lie in (0, 1], got {alpha}"
            )));
        }
        Ok(Self { alpha })
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `(α − 1)/α`, the factor every finite-N correction carries.
    pub fn odds_deficit(&self) -> f64 {
        (self.alpha - 1.0) / self.alpha
    }
}

/// Non-fatal problems found while building [`FieldStats`] from estimates.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldWarning {
    /// The implied covariance matrix has an eigenvalue below the tolerance.
    NotPositiveSemidefinite,
    /// `E r_i² < (E r_i)²` for this site beyond rounding.
    NegativeVariance { site: usize, variance: f64 },
    /// Small asymmetry was removed by averaging with the transpose.
    Symmetrized { max_relative_skew: f64 },
}

impl std::fmt::Display for FieldWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldWarning::NotPositiveSemidefinite => {
                write!(f, "implied covariance matrix is not positive semidefinite")
            }
            FieldWarning::NegativeVariance { site, variance } => {
                write!(f, "site {site} has negative variance {variance}")
            }
            FieldWarning::Symmetrized { max_relative_skew } => write!(
                f,
                "second-moment matrix symmetrized (max relative skew {max_relative_skew:e})"
            ),
        }
    }
}

/// First moments `E r_i` and raw second moments `E r_i r_j` of the field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldStats {
    mu: Vec<f64>,
    // row-major N×N
    second: Vec<f64>,
}

impl FieldStats {
    /// Strict constructor: the matrix must be symmetric to `1e-12` relative
    /// and the implied covariance positive semidefinite.
    pub fn new(mu: Vec<f64>, second: Vec<f64>) -> Result<Self> {
        let stats = Self::unchecked(mu, second)?;
        let skew = stats.max_relative_skew();
        if skew > STRICT_SYMMETRY_TOL {
            return Err(Error::invalid(format!(
                "second-moment matrix is not symmetric (relative skew {skew:e})"
            )));
        }
        if let Some(w) = stats.diagnose().into_iter().next() {
            return Err(Error::invalid(w.to_string()));
        }
        Ok(stats)
    }

    /// Lenient constructor for empirical estimates: asymmetry up to `1e-9`
    /// relative is averaged away, and covariance defects are reported as
    /// warnings instead of errors.
    pub fn from_estimates(mu: Vec<f64>, second: Vec<f64>) -> Result<(Self, Vec<FieldWarning>)> {
        let mut stats = Self::unchecked(mu, second)?;
        let skew = stats.max_relative_skew();
        if skew > LENIENT_SYMMETRY_TOL {
            return Err(Error::invalid(format!(
                "second-moment matrix is not symmetric (relative skew {skew:e})"
            )));
        }
        let mut warnings = Vec::new();
        if skew > 0.0 {
            let n = stats.n();
            for i in 0..n {
                for j in (i + 1)..n {
                    let avg = 0.5 * (stats.second[i * n + j] + stats.second[j * n + i]);
                    stats.second[i * n + j] = avg;
                    stats.second[j * n + i] = avg;
                }
            }
            warnings.push(FieldWarning::Symmetrized {
                max_relative_skew: skew,
            });
        }
        warnings.extend(stats.diagnose());
        Ok((stats, warnings))
    }

    /// Builds raw moments from means and a covariance matrix.
    pub fn from_covariance(mu: Vec<f64>, covariance: Vec<f64>) -> Result<Self> {
        let n = mu.len();
        if covariance.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: covariance.len(),
            });
        }
        let second = covariance
            .iter()
            .enumerate()
            .map(|(k, c)| c + mu[k / n] * mu[k % n])
            .collect();
        Self::new(mu, second)
    }

    /// Degenerate statistics of a single snapshot: `E r_i = r_i` and
    /// `E r_i r_j = r_i r_j`.
    pub fn from_epoch(epoch: &EpochField) -> Self {
        let r = epoch.values();
        let n = r.len();
        let mut second = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                second[i * n + j] = r[i] * r[j];
            }
        }
        Self {
            mu: r.to_vec(),
            second,
        }
    }

    fn unchecked(mu: Vec<f64>, second: Vec<f64>) -> Result<Self> {
        let n = mu.len();
        if n == 0 {
            return Err(Error::invalid("field must have at least one site"));
        }
        if second.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: second.len(),
            });
        }
        if mu.iter().chain(&second).any(|v| !v.is_finite()) {
            return Err(Error::invalid("field moments must be finite"));
        }
        Ok(Self { mu, second })
    }

    fn max_relative_skew(&self) -> f64 {
        let n = self.n();
        let scale = self.second.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (self.second[i * n + j] - self.second[j * n + i]).abs();
                worst = worst.max(d / scale);
            }
        }
        worst
    }

    fn diagnose(&self) -> Vec<FieldWarning> {
        let mut warnings = Vec::new();
        for i in 0..self.n() {
            let var = self.second(i, i) - self.mu[i] * self.mu[i];
            let tol = DIAGONAL_TOL * self.second(i, i).abs().max(1.0);
            if var < -tol {
                warnings.push(FieldWarning::NegativeVariance {
                    site: i,
                    variance: var,
                });
            }
        }
        if !self.covariance_is_psd() {
            warnings.push(FieldWarning::NotPositiveSemidefinite);
        }
        warnings
    }

    /// Cholesky test of `Σ + τI` with `τ = 1e-9 · max diagonal`. Succeeds
    /// exactly when no eigenvalue of the covariance falls below `−τ`
    /// (up to rounding).
    pub fn covariance_is_psd(&self) -> bool {
        let n = self.n();
        let cov = self.covariance();
        let max_diag = (0..n).fold(0.0f64, |m, i| m.max(cov[i * n + i].abs()));
        let tau = PSD_TOL * max_diag.max(f64::MIN_POSITIVE);
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = Neumaier::new();
            d += cov[j * n + j] + tau;
            for k in 0..j {
                d += -l[j * n + k] * l[j * n + k];
            }
            let d = d.value();
            if d < 0.0 {
                return false;
            }
            let ljj = d.sqrt();
            l[j * n + j] = ljj;
            for i in (j + 1)..n {
                let mut s = Neumaier::new();
                s += cov[i * n + j];
                for k in 0..j {
                    s += -l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = if ljj > 0.0 { s.value() / ljj } else { 0.0 };
            }
        }
        true
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    #[inline]
    pub fn second(&self, i: usize, j: usize) -> f64 {
        self.second[i * self.n() + j]
    }

    pub fn second_matrix(&self) -> &[f64] {
        &self.second
    }

    /// `σ_ij = E r_i r_j − E r_i E r_j`, row-major.
    pub fn covariance(&self) -> Vec<f64> {
        let n = self.n();
        self.second
            .iter()
            .enumerate()
            .map(|(k, s)| s - self.mu[k / n] * self.mu[k % n])
            .collect()
    }

    /// `Q · x` with compensated row sums.
    pub(crate) fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| summation::dot(&self.second[i * n..(i + 1) * n], x))
            .collect()
    }
}

/// The handful of field sums the uniform-weight formulas consume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldAggregates {
    pub n: usize,
    /// `Σ E r_i`
    pub sum_mu: f64,
    /// `Σ (E r_i)²`
    pub sum_mu_sq: f64,
    /// `Σ_{i≠j} E r_i E r_j`
    pub sum_mu_outer: f64,
    /// `Σ E r_i²`
    pub sum_sq: f64,
    /// `Σ_{i≠j} E r_i r_j`
    pub sum_cross: f64,
}

impl FieldAggregates {
    pub fn from_stats(f: &FieldStats) -> Self {
        let n = f.n();
        let sum_mu = summation::sum(f.mu().iter().copied());
        let sum_mu_sq = summation::sum(f.mu().iter().map(|m| m * m));
        let sum_sq = summation::sum((0..n).map(|i| f.second(i, i)));
        let sum_cross = summation::sum(
            (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| f.second(i, j))),
        );
        Self {
            n,
            sum_mu,
            sum_mu_sq,
            sum_mu_outer: sum_mu * sum_mu - sum_mu_sq,
            sum_sq,
            sum_cross,
        }
    }

    /// Aggregates of a single snapshot, computed in O(N).
    pub fn from_epoch(epoch: &EpochField) -> Self {
        let r = epoch.values();
        let sum_mu = summation::sum(r.iter().copied());
        let sum_sq = summation::sum(r.iter().map(|v| v * v));
        let cross = sum_mu * sum_mu - sum_sq;
        Self {
            n: r.len(),
            sum_mu,
            sum_mu_sq: sum_sq,
            sum_mu_outer: cross,
            sum_sq,
            sum_cross: cross,
        }
    }

    /// `Σ σ_i²`
    pub fn sum_variance(&self) -> f64 {
        self.sum_sq - self.sum_mu_sq
    }

    /// `Σ_{i≠j} σ_ij`
    pub fn sum_covariance(&self) -> f64 {
        self.sum_cross - self.sum_mu_outer
    }
}
