//! Seeded synthetic rainfall-like field.
//!
//! Sites lie on a 1-D index. A stationary AR(1) Gaussian process with
//! correlation `exp(−1/L)` between neighbours is exponentiated to give
//! lognormal marginals with the requested median and log-scale spread.

use crate::error::{Error, Result};
use crate::estimators::EpochField;
use crate::montecarlo::stream::{Domain, Stream};

/// Site count of the default field.
pub const DEFAULT_SITES: usize = 357;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub sites: usize,
    pub median: f64,
    pub log_sd: f64,
    /// Correlation length in site-index units.
    pub correlation_length: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            sites: DEFAULT_SITES,
            median: 6.0,
            log_sd: 1.0,
            correlation_length: 5.0,
        }
    }
}

/// Draws a field from `spec`; a pure function of `(spec, seed)`.
pub fn generate(spec: &SyntheticSpec, seed: u64) -> Result<EpochField> {
    if spec.sites == 0 {
        return Err(Error::invalid("synthetic field needs at least one site"));
    }
    if !(spec.median > 0.0 && spec.log_sd >= 0.0 && spec.correlation_length > 0.0) {
        return Err(Error::invalid(
            "synthetic field needs median > 0, log_sd >= 0 and correlation_length > 0",
        ));
    }
    let stream = Stream::new(seed, Domain::Synthetic);
    let rho = (-1.0 / spec.correlation_length).exp();
    let innovation = (1.0 - rho * rho).sqrt();
    let mut z = stream.normal(0);
    let mut values = Vec::with_capacity(spec.sites);
    values.push(spec.median * (spec.log_sd * z).exp());
    for i in 1..spec.sites {
        z = rho * z + innovation * stream.normal(i as u64);
        values.push(spec.median * (spec.log_sd * z).exp());
    }
    EpochField::new(values)
}

/// The default 357-site field.
pub fn default_field(seed: u64) -> EpochField {
    generate(&SyntheticSpec::default(), seed).expect("default spec is valid")
}
