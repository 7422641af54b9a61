//! Mixed moments `E S^l`, `E R S^l` and `E R² S^l` of the weighted
//! numerator `R = Σ β_i s_i r_i` and denominator `S = Σ β_i s_i`.

mod general;
mod large_n;
mod types;
mod uniform;

pub use general::{moment_r2s, moment_rs, moment_s};
pub use large_n::{mean_r2_uniform, mean_r_uniform, moments_large_n};
pub use types::{FieldAggregates, FieldStats, FieldWarning, ReportingModel, WeightVector};
pub use uniform::{
    coefficient_identity_check, moment_r2s_uniform, moment_rs_uniform, moment_s_uniform,
    r2s_cross_coefficients, r2s_diagonal_coefficients, rs_coefficients, s_coefficients,
};

use crate::error::Result;

/// Every moment the second-order variance formula consumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub es1: f64,
    pub es2: f64,
    pub es3: f64,
    pub es4: f64,
    pub ers0: f64,
    pub ers1: f64,
    pub ers2: f64,
    pub er2s0: f64,
    pub er2s1: f64,
    pub er2s2: f64,
}

impl MomentSet {
    /// `E S^l` for `l ∈ 1..=4`.
    pub fn es(&self, l: u32) -> Option<f64> {
        match l {
            1 => Some(self.es1),
            2 => Some(self.es2),
            3 => Some(self.es3),
            4 => Some(self.es4),
            _ => None,
        }
    }

    /// `E R S^l` for `l ∈ 0..=2`.
    pub fn ers(&self, l: u32) -> Option<f64> {
        [self.ers0, self.ers1, self.ers2].get(l as usize).copied()
    }

    /// `E R² S^l` for `l ∈ 0..=2`.
    pub fn er2s(&self, l: u32) -> Option<f64> {
        [self.er2s0, self.er2s1, self.er2s2]
            .get(l as usize)
            .copied()
    }

    /// `(name, value)` pairs in a fixed order, for tabular output.
    pub fn entries(&self) -> [(&'static str, f64); 10] {
        [
            ("E[S]", self.es1),
            ("E[S^2]", self.es2),
            ("E[S^3]", self.es3),
            ("E[S^4]", self.es4),
            ("E[R]", self.ers0),
            ("E[R S]", self.ers1),
            ("E[R S^2]", self.ers2),
            ("E[R^2]", self.er2s0),
            ("E[R^2 S]", self.er2s1),
            ("E[R^2 S^2]", self.er2s2),
        ]
    }
}

fn general_set(w: &WeightVector, rm: &ReportingModel, f: &FieldStats) -> Result<MomentSet> {
    Ok(MomentSet {
        es1: rm.alpha(),
        es2: moment_s(2, w, rm)?,
        es3: moment_s(3, w, rm)?,
        es4: moment_s(4, w, rm)?,
        ers0: moment_rs(0, w, rm, f)?,
        ers1: moment_rs(1, w, rm, f)?,
        ers2: moment_rs(2, w, rm, f)?,
        er2s0: moment_r2s(0, w, rm, f)?,
        er2s1: moment_r2s(1, w, rm, f)?,
        er2s2: moment_r2s(2, w, rm, f)?,
    })
}

/// Uniform-weight moment set built from field aggregates alone, O(1) in `N`.
pub fn uniform_moment_set(rm: &ReportingModel, agg: &FieldAggregates) -> Result<MomentSet> {
    let n = agg.n;
    Ok(MomentSet {
        es1: rm.alpha(),
        es2: moment_s_uniform(2, n, rm)?,
        es3: moment_s_uniform(3, n, rm)?,
        es4: moment_s_uniform(4, n, rm)?,
        ers0: moment_rs_uniform(0, n, rm, agg)?,
        ers1: moment_rs_uniform(1, n, rm, agg)?,
        ers2: moment_rs_uniform(2, n, rm, agg)?,
        er2s0: moment_r2s_uniform(0, n, rm, agg)?,
        er2s1: moment_r2s_uniform(1, n, rm, agg)?,
        er2s2: moment_r2s_uniform(2, n, rm, agg)?,
    })
}

/// Assembles the full [`MomentSet`]. Uniform weights with `N ≥ 2` go
/// through the Stirling closed forms; debug builds cross-check them
/// against the general formulas.
pub fn compute_moment_set(
    w: &WeightVector,
    rm: &ReportingModel,
    f: &FieldStats,
) -> Result<MomentSet> {
    if w.len() != f.n() {
        return Err(crate::Error::DimensionMismatch {
            expected: w.len(),
            found: f.n(),
        });
    }
    if !(w.is_uniform() && w.len() >= 2) {
        return general_set(w, rm, f);
    }
    let agg = FieldAggregates::from_stats(f);
    let set = uniform_moment_set(rm, &agg)?;
    #[cfg(debug_assertions)]
    {
        let general = general_set(w, rm, f)?;
        let scale = agg.sum_sq.abs() + agg.sum_cross.abs() + agg.sum_mu.abs() + 1.0;
        for ((name, a), (_, b)) in set.entries().iter().zip(general.entries()) {
            debug_assert!(
                (a - b).abs() <= 1e-9 * scale,
                "{name}: closed form {a} disagrees with general formula {b}"
            );
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_one_unit_moments() {
        let w = WeightVector::normalized(vec![1.0, 2.0, 3.0]).unwrap();
        let f = FieldStats::from_covariance(
            vec![1.0, -1.0, 2.0],
            vec![1.0, 0.2, 0.0, 0.2, 1.0, 0.1, 0.0, 0.1, 2.0],
        )
        .unwrap();
        let rm = ReportingModel::new(1.0).unwrap();
        let ms = compute_moment_set(&w, &rm, &f).unwrap();
        for l in 1..=4 {
            assert!((ms.es(l).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn two_site_constant_field() {
        let w = WeightVector::uniform(2).unwrap();
        let f = FieldStats::new(vec![1.0, 1.0], vec![1.0; 4]).unwrap();
        let rm = ReportingModel::new(0.5).unwrap();
        let ms = compute_moment_set(&w, &rm, &f).unwrap();
        assert!((ms.ers1 - 0.375).abs() < 1e-15);
        assert!((ms.es2 - 0.375).abs() < 1e-15);
    }

    #[test]
    fn first_moment_exact() {
        for alpha in [0.1, 0.37, 0.9] {
            let rm = ReportingModel::new(alpha).unwrap();
            let w = WeightVector::uniform(5).unwrap();
            let f = FieldStats::from_covariance(vec![0.0; 5], identity(5)).unwrap();
            assert_eq!(compute_moment_set(&w, &rm, &f).unwrap().es1, alpha);
        }
    }

    #[test]
    fn accessors() {
        let w = WeightVector::uniform(3).unwrap();
        let f = FieldStats::from_covariance(vec![1.0; 3], identity(3)).unwrap();
        let ms = compute_moment_set(&w, &ReportingModel::new(0.5).unwrap(), &f).unwrap();
        assert_eq!(ms.es(0), None);
        assert_eq!(ms.ers(2), Some(ms.ers2));
        assert_eq!(ms.er2s(3), None);
        assert_eq!(ms.entries()[7].1, ms.er2s0);
    }

    fn identity(n: usize) -> Vec<f64> {
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            m[i * n + i] = 1.0;
        }
        m
    }
}
