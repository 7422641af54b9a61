//! Diagnostics for whether the series behind the variance estimators
//! converges.
//!
//! The expansion of `1/S` about `E S = α` converges absolutely when
//! `|S − α| < α`. Since `0 ≤ S ≤ 1`, the worst case `S = 0` gives the
//! sufficient condition `(1−α)/α < 1`, i.e. `α > 1/2`. Below that the risky
//! event is `S ≥ 2α`, bounded here by Hoeffding's inequality.

use std::fmt;

use crate::moments::{ReportingModel, WeightVector};

/// `(α > 1/2, 1 − (1−α)/α)`. A positive margin means the ratio test holds
/// for every mask.
pub fn ratio_condition(rm: &ReportingModel) -> (bool, f64) {
    let a = rm.alpha();
    (a > 0.5, 1.0 - (1.0 - a) / a)
}

/// Hoeffding bound `exp(−2α²/Σβ_i²)` on `P(S ≥ 2 E S)`. Zero at `α = 1`,
/// where the event is impossible.
pub fn hoeffding_bound(w: &WeightVector, rm: &ReportingModel) -> f64 {
    let a = rm.alpha();
    if a >= 1.0 {
        return 0.0;
    }
    (-2.0 * a * a / w.power_sum(2)).exp()
}

/// How many binomial standard deviations `S` must stray from its mean
/// before the series can diverge: `√(Nα/(1−α))`, infinite at `α = 1`.
pub fn sd_distance(n: usize, rm: &ReportingModel) -> f64 {
    let a = rm.alpha();
    if a >= 1.0 {
        return f64::INFINITY;
    }
    (n as f64 * a / (1.0 - a)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Ratio condition holds: convergence for every mask.
    Assured,
    /// Condition fails but the Hoeffding tail is below `1e-3`.
    Likely,
    Risky,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Assured => "assured",
            Verdict::Likely => "likely",
            Verdict::Risky => "risky",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tail probability below which a failed ratio test is still reported as
/// [`Verdict::Likely`].
pub const LIKELY_TAIL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    pub alpha: f64,
    pub n: usize,
    pub ratio_margin: f64,
    pub hoeffding_tail: f64,
    pub sd_distance: f64,
    pub verdict: Verdict,
}

pub fn convergence_report(w: &WeightVector, rm: &ReportingModel) -> ConvergenceReport {
    let (holds, ratio_margin) = ratio_condition(rm);
    let hoeffding_tail = hoeffding_bound(w, rm);
    let verdict = if holds {
        Verdict::Assured
    } else if hoeffding_tail < LIKELY_TAIL {
        Verdict::Likely
    } else {
        Verdict::Risky
    };
    ConvergenceReport {
        alpha: rm.alpha(),
        n: w.len(),
        ratio_margin,
        hoeffding_tail,
        sd_distance: sd_distance(w.len(), rm),
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rm(a: f64) -> ReportingModel {
        ReportingModel::new(a).unwrap()
    }

    #[test]
    fn ratio_examples() {
        let (ok, m) = ratio_condition(&rm(0.6));
        assert!(ok && (m - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(ratio_condition(&rm(0.5)), (false, 0.0));
        assert_eq!(ratio_condition(&rm(1.0)), (true, 1.0));
    }

    #[test]
    fn hoeffding_examples() {
        let u100 = WeightVector::uniform(100).unwrap();
        assert!((hoeffding_bound(&u100, &rm(0.1)) - (-2.0f64).exp()).abs() < 1e-12);
        assert!((hoeffding_bound(&u100, &rm(0.5)) / (-50.0f64).exp() - 1.0).abs() < 1e-12);
        let skew = WeightVector::new(vec![0.9, 0.1]).unwrap();
        let b = hoeffding_bound(&skew, &rm(0.5));
        assert!((b - (-0.5f64 / 0.82).exp()).abs() < 1e-12);
        let flat = hoeffding_bound(&WeightVector::uniform(2).unwrap(), &rm(0.5));
        assert!((flat - (-1.0f64).exp()).abs() < 1e-12);
        assert!(b > flat);
        assert_eq!(hoeffding_bound(&u100, &rm(1.0)), 0.0);
    }

    #[test]
    fn sd_examples() {
        assert!((sd_distance(100, &rm(0.1)) - 10.0 / 3.0).abs() < 1e-12);
        assert!((sd_distance(100, &rm(0.5)) - 10.0).abs() < 1e-12);
        assert!((sd_distance(1, &rm(0.5)) - 1.0).abs() < 1e-15);
        assert_eq!(sd_distance(5, &rm(1.0)), f64::INFINITY);
    }

    #[test]
    fn verdicts() {
        let any = WeightVector::normalized(vec![1.0, 4.0]).unwrap();
        assert_eq!(convergence_report(&any, &rm(0.8)).verdict, Verdict::Assured);
        let big = WeightVector::uniform(1000).unwrap();
        let r = convergence_report(&big, &rm(0.1));
        assert_eq!(r.verdict, Verdict::Likely);
        assert!((r.hoeffding_tail / (-20.0f64).exp() - 1.0).abs() < 1e-9);
        let small = WeightVector::uniform(10).unwrap();
        assert_eq!(convergence_report(&small, &rm(0.1)).verdict, Verdict::Risky);
        assert_eq!(convergence_report(&small, &rm(0.5)).verdict, Verdict::Risky);
    }
}
