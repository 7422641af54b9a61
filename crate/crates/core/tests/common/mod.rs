//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use spatialvar::montecarlo::stream::{Domain, Stream};
use spatialvar::{EpochField, FieldAggregates, FieldStats, WeightVector};

pub fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub fn uniforms(seed: u64, count: usize) -> Vec<f64> {
    let s = Stream::new(seed, Domain::Synthetic).substream(0xF1C7);
    (0..count as u64).map(|c| s.uniform(c)).collect()
}

pub fn random_weights(n: usize, seed: u64) -> WeightVector {
    let raw = uniforms(seed, n).into_iter().map(|u| 0.2 + u).collect();
    WeightVector::normalized(raw).unwrap()
}

/// Positive means and covariance `A Aᵀ / N` with `A` uniform on `[-1, 1)`.
pub fn random_psd_field(n: usize, seed: u64) -> FieldStats {
    let u = uniforms(seed ^ 0x5EED, n + n * n);
    let mu: Vec<f64> = u[..n].iter().map(|x| 1.0 + 2.0 * x).collect();
    let a: Vec<f64> = u[n..].iter().map(|x| 2.0 * x - 1.0).collect();
    let mut cov = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            cov[i * n + j] = (0..n).map(|k| a[i * n + k] * a[j * n + k]).sum::<f64>() / n as f64;
        }
    }
    FieldStats::from_covariance(mu, cov).unwrap()
}

pub fn random_epoch(n: usize, seed: u64) -> EpochField {
    EpochField::new(
        uniforms(seed ^ 0xE90C, n)
            .into_iter()
            .map(|u| 5.0 * u)
            .collect(),
    )
    .unwrap()
}

/// `{l over m}` from the inclusion–exclusion sum, in `i128`.
pub fn stirling_explicit(l: u32, m: u32) -> u128 {
    let mut acc: i128 = 0;
    let mut binom: i128 = 1;
    for j in 0..=m {
        let term = binom * i128::from(m - j).pow(l);
        acc += if j % 2 == 0 { term } else { -term };
        binom = binom * i128::from(m - j) / i128::from(j + 1);
    }
    let fact: i128 = (1..=i128::from(m)).product();
    (acc / fact) as u128
}

/// Bell numbers from the Bell triangle.
pub fn bell_numbers(count: usize) -> Vec<u128> {
    let mut out = vec![1u128];
    let mut row = vec![1u128];
    while out.len() < count {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        out.push(next[0]);
        row = next;
    }
    out
}

/// Aggregates of a field with means `1 + sin(i)/2` and covariance
/// `exp(−3|i−j|/N)/2`, whose correlation length grows with `N`.
pub fn correlated_aggregates(n: usize) -> FieldAggregates {
    let nf = n as f64;
    let mu: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * (i as f64).sin()).collect();
    let sum_mu: f64 = mu.iter().sum();
    let sum_mu_sq: f64 = mu.iter().map(|m| m * m).sum();
    let sum_cov: f64 = (1..n)
        .map(|d| 2.0 * (nf - d as f64) * 0.5 * (-3.0 * d as f64 / nf).exp())
        .sum();
    let sum_mu_outer = sum_mu * sum_mu - sum_mu_sq;
    FieldAggregates {
        n,
        sum_mu,
        sum_mu_sq,
        sum_mu_outer,
        sum_sq: sum_mu_sq + 0.5 * nf,
        sum_cross: sum_mu_outer + sum_cov,
    }
}
