//! Mixed moments for arbitrary weights.
//!
//! Every sum over distinct indices (`Σ_{i≠j}`, `Σ_{i≠j≠k}`, …, indices
//! pairwise distinct) is rewritten through inclusion–exclusion on power
//! sums `p_k = Σ β^k`, weighted power sums of the field, and the two
//! matrix-vector products `Q β` and `Q β²`. The cost is O(N²) for the
//! second-moment terms and O(N) otherwise.

use crate::error::{Error, Result};
use crate::summation;

use super::types::{FieldStats, ReportingModel, WeightVector};

/// Power sums `p_1..p_4` of the weights.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PowerSums {
    p1: f64,
    p2: f64,
    p3: f64,
    p4: f64,
}

impl PowerSums {
    pub(crate) fn of(w: &WeightVector) -> Self {
        Self {
            p1: w.power_sum(1),
            p2: w.power_sum(2),
            p3: w.power_sum(3),
            p4: w.power_sum(4),
        }
    }

    /// `Σ_{j≠k} β_j β_k`
    fn pair(&self) -> f64 {
        self.p1 * self.p1 - self.p2
    }

    /// `Σ_{j≠k} β_j β_k²`
    fn pair_12(&self) -> f64 {
        self.p1 * self.p2 - self.p3
    }

    /// `Σ_{j≠k} β_j β_k³`
    fn pair_13(&self) -> f64 {
        self.p1 * self.p3 - self.p4
    }

    /// `Σ_{j≠k} β_j² β_k²`
    fn pair_22(&self) -> f64 {
        self.p2 * self.p2 - self.p4
    }

    /// `Σ_{i,j,k distinct} β_i β_j β_k`
    fn triple(&self) -> f64 {
        let p1 = self.p1;
        p1 * p1 * p1 - 3.0 * p1 * self.p2 + 2.0 * self.p3
    }

    /// `Σ_{i,j,k distinct} β_i β_j β_k²`
    fn triple_112(&self) -> f64 {
        let p1 = self.p1;
        p1 * p1 * self.p2 - 2.0 * p1 * self.p3 - self.p2 * self.p2 + 2.0 * self.p4
    }

    /// `Σ_{i,j,k,m distinct} β_i β_j β_k β_m`
    fn quadruple(&self) -> f64 {
        let p1 = self.p1;
        let p2 = self.p2;
        p1.powi(4) - 6.0 * p1 * p1 * p2 + 8.0 * p1 * self.p3 + 3.0 * p2 * p2 - 6.0 * self.p4
    }
}

fn check_dims(w: &WeightVector, f: &FieldStats) -> Result<()> {
    if w.len() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            found: f.n(),
        });
    }
    Ok(())
}

/// `E S^l` for `l ∈ 1..=4`.
pub fn moment_s(l: u32, w: &WeightVector, rm: &ReportingModel) -> Result<f64> {
    let a = rm.alpha();
    let p = PowerSums::of(w);
    let value = match l {
        1 => a,
        2 => a * p.p2 + a * a * p.pair(),
        3 => a * p.p3 + a.powi(2) * 3.0 * p.pair_12() + a.powi(3) * p.triple(),
        4 => summation::sum([
            a * p.p4,
            a.powi(2) * (4.0 * p.pair_13() + 3.0 * p.pair_22()),
            a.powi(3) * 6.0 * p.triple_112(),
            a.powi(4) * p.quadruple(),
        ]),
        _ => {
            return Err(Error::domain(format!(
                "E S^l with general weights is available for l in 1..=4, got {l}"
            )))
        }
    };
    Ok(value)
}

/// `E R S^l` for `l ∈ 0..=2`; linear in the first moments.
pub fn moment_rs(l: u32, w: &WeightVector, rm: &ReportingModel, f: &FieldStats) -> Result<f64> {
    check_dims(w, f)?;
    let a = rm.alpha();
    let p = PowerSums::of(w);
    let beta = w.as_slice();
    let mu = f.mu();
    // q_k = Σ β_i^k E r_i
    let q = |k: i32| summation::sum(beta.iter().zip(mu).map(|(b, m)| b.powi(k) * m));
    let value = match l {
        0 => a * q(1),
        1 => {
            let (q1, q2) = (q(1), q(2));
            // Σ_{i≠j} β_i β_j E r_i = q1 p1 − q2
            a * q2 + a * a * (q1 * p.p1 - q2)
        }
        2 => {
            let (q1, q2, q3) = (q(1), q(2), q(3));
            // Σ_{i≠j} β_i β_j² E r_i
            let s_12 = q1 * p.p2 - q3;
            // Σ_{i≠j} β_i² β_j E r_i
            let s_21 = q2 * p.p1 - q3;
            // Σ_{i,j,k distinct} β_i β_j β_k E r_i
            let s_111 = q1 * p.pair() - 2.0 * p.p1 * q2 + 2.0 * q3;
            summation::sum([a * q3, a * a * (s_12 + 2.0 * s_21), a.powi(3) * s_111])
        }
        _ => {
            return Err(Error::domain(format!(
                "E R S^l with general weights is available for l in 0..=2, got {l}"
            )))
        }
    };
    Ok(value)
}

/// Weighted contractions of the second-moment matrix `Q`.
struct SecondMomentSums {
    /// `d_k = Σ β_i^k Q_ii`
    d: [f64; 5],
    /// `T(a,b) = Σ_{i≠j} β_i^a β_j^b Q_ij`
    t11: f64,
    t21: f64,
    t31: f64,
    t22: f64,
}

impl SecondMomentSums {
    fn of(w: &WeightVector, f: &FieldStats, need_quartic: bool) -> Self {
        let beta = w.as_slice();
        let n = beta.len();
        let pow = |k: i32| beta.iter().map(|b| b.powi(k)).collect::<Vec<_>>();
        let (b1, b2, b3) = (beta.to_vec(), pow(2), pow(3));
        let mut d = [0.0; 5];
        for (k, dk) in d.iter_mut().enumerate() {
            *dk = summation::sum((0..n).map(|i| beta[i].powi(k as i32) * f.second(i, i)));
        }
        let q_b1 = f.mat_vec(&b1);
        let t11 = summation::dot(&b1, &q_b1) - d[2];
        let t21 = summation::dot(&b2, &q_b1) - d[3];
        let t31 = summation::dot(&b3, &q_b1) - d[4];
        let t22 = if need_quartic {
            let q_b2 = f.mat_vec(&b2);
            summation::dot(&b2, &q_b2) - d[4]
        } else {
            0.0
        };
        Self {
            d,
            t11,
            t21,
            t31,
            t22,
        }
    }

    /// `U(a,b) = Σ_{i≠j} β_i^a β_j^b Q_ii = d_a p_b − d_{a+b}`
    fn u(&self, a: usize, p_b: f64, b: usize) -> f64 {
        self.d[a] * p_b - self.d[a + b]
    }
}

/// `E R² S^l` for `l ∈ 0..=2`; bilinear in the raw second moments.
pub fn moment_r2s(l: u32, w: &WeightVector, rm: &ReportingModel, f: &FieldStats) -> Result<f64> {
    check_dims(w, f)?;
    if l > 2 {
        return Err(Error::domain(format!(
            "E R² S^l with general weights is available for l in 0..=2, got {l}"
        )));
    }
    let a = rm.alpha();
    let p = PowerSums::of(w);
    let s = SecondMomentSums::of(w, f, l == 2);
    let value = match l {
        0 => a * s.d[2] + a * a * s.t11,
        1 => {
            // Σ_{i,j,k distinct} β_i β_j β_k Q_ij
            let tri = p.p1 * s.t11 - 2.0 * s.t21;
            summation::sum([
                a * s.d[3],
                a * a * (s.u(2, p.p1, 1) + 2.0 * s.t21),
                a.powi(3) * tri,
            ])
        }
        _ => {
            let quad_alpha2 = s.u(2, p.p2, 2) + 2.0 * s.t31 + 2.0 * s.u(3, p.p1, 1) + 2.0 * s.t22;
            // Σ_{ijk distinct} β_i β_j β_k² Q_ij
            let tri_q112 = p.p2 * s.t11 - 2.0 * s.t31;
            // Σ_{ijk distinct} β_i² β_j β_k Q_ii
            let tri_d211 = s.d[2] * p.pair() - 2.0 * p.p1 * s.d[3] + 2.0 * s.d[4];
            // Σ_{ijk distinct} β_i² β_j β_k Q_ij
            let tri_q211 = p.p1 * s.t21 - s.t31 - s.t22;
            // Σ_{ijkm distinct} β_i β_j β_k β_m Q_ij
            let quad = p.pair() * s.t11 - 4.0 * p.p1 * s.t21 + 4.0 * s.t31 + 2.0 * s.t22;
            summation::sum([
                a * s.d[4],
                a * a * quad_alpha2,
                a.powi(3) * (tri_q112 + tri_d211 + 4.0 * tri_q211),
                a.powi(4) * quad,
            ])
        }
    };
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Explicit loops over pairwise-distinct index tuples.
    struct Naive<'a> {
        b: &'a [f64],
        mu: &'a [f64],
        f: &'a FieldStats,
    }

    impl Naive<'_> {
        fn n(&self) -> usize {
            self.b.len()
        }

        fn pairs(&self, g: impl Fn(usize, usize) -> f64) -> f64 {
            let n = self.n();
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        s += g(i, j);
                    }
                }
            }
            s
        }

        fn triples(&self, g: impl Fn(usize, usize, usize) -> f64) -> f64 {
            self.pairs(|i, j| {
                (0..self.n())
                    .filter(|&k| k != i && k != j)
                    .map(|k| g(i, j, k))
                    .sum()
            })
        }

        fn quads(&self, g: impl Fn(usize, usize, usize, usize) -> f64) -> f64 {
            self.triples(|i, j, k| {
                (0..self.n())
                    .filter(|&m| m != i && m != j && m != k)
                    .map(|m| g(i, j, k, m))
                    .sum()
            })
        }

        fn es(&self, l: u32, a: f64) -> f64 {
            let b = self.b;
            let single = |k: i32| b.iter().map(|x| x.powi(k)).sum::<f64>();
            match l {
                2 => a * single(2) + a * a * self.pairs(|j, k| b[j] * b[k]),
                3 => {
                    a * single(3)
                        + a * a * self.pairs(|j, k| 3.0 * b[j] * b[k] * b[k])
                        + a.powi(3) * self.triples(|i, j, k| b[i] * b[j] * b[k])
                }
                4 => {
                    a * single(4)
                        + a * a
                            * self.pairs(|j, k| {
                                4.0 * b[j] * b[k].powi(3) + 3.0 * b[j].powi(2) * b[k].powi(2)
                            })
                        + a.powi(3) * self.triples(|i, j, k| 6.0 * b[i] * b[j] * b[k] * b[k])
                        + a.powi(4) * self.quads(|i, j, k, m| b[i] * b[j] * b[k] * b[m])
                }
                _ => unreachable!(),
            }
        }

        fn ers2(&self, a: f64) -> f64 {
            let (b, mu) = (self.b, self.mu);
            a * b.iter().zip(mu).map(|(x, m)| x.powi(3) * m).sum::<f64>()
                + a * a
                    * self
                        .pairs(|i, j| b[i] * b[j] * b[j] * mu[i] + 2.0 * b[i] * b[i] * b[j] * mu[i])
                + a.powi(3) * self.triples(|i, j, k| b[i] * b[j] * b[k] * mu[i])
        }

        fn er2s2(&self, a: f64) -> f64 {
            let (b, f) = (self.b, self.f);
            let q = |i: usize, j: usize| f.second(i, j);
            a * (0..self.n()).map(|i| b[i].powi(4) * q(i, i)).sum::<f64>()
                + a * a
                    * self.pairs(|i, j| {
                        b[i].powi(2) * b[j].powi(2) * q(i, i)
                            + 2.0 * b[i].powi(3) * b[j] * q(i, j)
                            + 2.0 * b[i].powi(3) * b[j] * q(i, i)
                            + 2.0 * b[i].powi(2) * b[j].powi(2) * q(i, j)
                    })
                + a.powi(3)
                    * self.triples(|i, j, k| {
                        b[i] * b[j] * b[k] * b[k] * q(i, j)
                            + b[i] * b[i] * b[j] * b[k] * q(i, i)
                            + 4.0 * b[i] * b[i] * b[j] * b[k] * q(i, j)
                    })
                + a.powi(4) * self.quads(|i, j, k, m| b[i] * b[j] * b[k] * b[m] * q(i, j))
        }

        fn er2s(&self, a: f64) -> f64 {
            let (b, f) = (self.b, self.f);
            let q = |i: usize, j: usize| f.second(i, j);
            a * (0..self.n()).map(|i| b[i].powi(3) * q(i, i)).sum::<f64>()
                + a * a
                    * self.pairs(|i, j| {
                        b[i] * b[i] * b[j] * q(i, i) + 2.0 * b[i] * b[i] * b[j] * q(i, j)
                    })
                + a.powi(3) * self.triples(|i, j, k| b[i] * b[j] * b[k] * q(i, j))
        }
    }

    fn fixture(n: usize) -> (WeightVector, FieldStats) {
        // non-uniform weights, mixed-sign means, exponential-kernel covariance
        let raw: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7) % 5) as f64).collect();
        let w = WeightVector::normalized(raw).unwrap();
        let mu: Vec<f64> = (0..n).map(|i| (i as f64 * 0.9).sin() + 0.3).collect();
        let scale: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
        let mut cov = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                cov[i * n + j] = scale[i] * scale[j] * 0.8f64.powi((i as i32 - j as i32).abs());
            }
        }
        (w, FieldStats::from_covariance(mu, cov).unwrap())
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn reductions_match_naive_loops() {
        for n in 1..=8 {
            let (w, f) = fixture(n);
            let naive = Naive {
                b: w.as_slice(),
                mu: f.mu(),
                f: &f,
            };
            for alpha in [0.15, 0.6, 1.0] {
                let rm = ReportingModel::new(alpha).unwrap();
                for l in 2..=4 {
                    let (x, y) = (moment_s(l, &w, &rm).unwrap(), naive.es(l, alpha));
                    assert!(close(x, y), "E S^{l} n={n} a={alpha}: {x} vs {y}");
                }
                let (x, y) = (moment_rs(2, &w, &rm, &f).unwrap(), naive.ers2(alpha));
                assert!((x - y).abs() < 1e-12, "E RS^2 n={n}: {x} vs {y}");
                let (x, y) = (moment_r2s(1, &w, &rm, &f).unwrap(), naive.er2s(alpha));
                assert!(close(x, y), "E R^2 S n={n}: {x} vs {y}");
                let (x, y) = (moment_r2s(2, &w, &rm, &f).unwrap(), naive.er2s2(alpha));
                assert!(close(x, y), "E R^2 S^2 n={n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn first_moment_is_alpha() {
        let (w, _) = fixture(5);
        let rm = ReportingModel::new(0.37).unwrap();
        assert_eq!(moment_s(1, &w, &rm).unwrap(), 0.37);
    }

    #[test]
    fn two_site_uniform_second_moment() {
        let w = WeightVector::uniform(2).unwrap();
        let rm = ReportingModel::new(0.5).unwrap();
        assert!((moment_s(2, &w, &rm).unwrap() - 0.375).abs() < 1e-15);
        let f = FieldStats::new(vec![1.0, 1.0], vec![1.0; 4]).unwrap();
        assert!((moment_rs(1, &w, &rm, &f).unwrap() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn alpha_one_gives_unit_s_moments() {
        let (w, _) = fixture(6);
        let rm = ReportingModel::new(1.0).unwrap();
        for l in 1..=4 {
            assert!((moment_s(l, &w, &rm).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_field_collapses_to_s_moments() {
        let w = WeightVector::normalized(vec![1.0, 3.0, 2.0, 0.5]).unwrap();
        let f = FieldStats::new(vec![1.0; 4], vec![1.0; 16]).unwrap();
        let rm = ReportingModel::new(0.7).unwrap();
        let es2 = moment_s(2, &w, &rm).unwrap();
        let es3 = moment_s(3, &w, &rm).unwrap();
        let es4 = moment_s(4, &w, &rm).unwrap();
        assert!(close(moment_rs(1, &w, &rm, &f).unwrap(), es2));
        assert!(close(moment_rs(2, &w, &rm, &f).unwrap(), es3));
        assert!(close(moment_r2s(0, &w, &rm, &f).unwrap(), es2));
        assert!(close(moment_r2s(1, &w, &rm, &f).unwrap(), es3));
        assert!(close(moment_r2s(2, &w, &rm, &f).unwrap(), es4));
    }

    #[test]
    fn r2_at_alpha_one() {
        let (w, f) = fixture(4);
        let rm = ReportingModel::new(1.0).unwrap();
        let b = w.as_slice();
        let mut expected = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                expected += b[i] * b[j] * f.second(i, j);
            }
        }
        assert!(close(moment_r2s(0, &w, &rm, &f).unwrap(), expected));
    }

    #[test]
    fn out_of_range_orders_and_dimensions() {
        let (w, f) = fixture(3);
        let rm = ReportingModel::new(0.5).unwrap();
        assert!(moment_s(0, &w, &rm).is_err());
        assert!(moment_s(5, &w, &rm).is_err());
        assert!(moment_rs(3, &w, &rm, &f).is_err());
        assert!(moment_r2s(3, &w, &rm, &f).is_err());
        let (_, f4) = fixture(4);
        assert!(matches!(
            moment_rs(0, &w, &rm, &f4),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            moment_r2s(0, &w, &rm, &f4),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
