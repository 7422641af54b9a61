//! Grid syntax: `start:stop:step` (inclusive) or a comma-separated list.

use crate::error::{Error, Result};

const SNAP: f64 = 1e12;

fn snap(v: f64) -> f64 {
    (v * SNAP).round() / SNAP
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::invalid(format!("'{s}' is not a finite number")))
}

fn strictly_increasing<T: PartialOrd + Copy + std::fmt::Display>(v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::invalid("grid is empty"));
    }
    if let Some(w) = v.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::invalid(format!(
            "grid must be strictly increasing: {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Parses a real grid. Range points are rounded to 1e-12 so that
/// `0.1:0.9:0.1` yields exactly nine values ending at `0.9`.
pub fn parse_real_grid(spec: &str) -> Result<Vec<f64>> {
    let values = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(Error::invalid(format!(
                "range '{spec}' must be start:stop:step"
            )));
        };
        let (start, stop, step) = (parse_f64(start)?, parse_f64(stop)?, parse_f64(step)?);
        if step <= 0.0 {
            return Err(Error::invalid(format!(
                "range step must be positive, got {step}"
            )));
        }
        let count = ((stop - start) / step + 1e-9).floor();
        if count < 0.0 {
            return Err(Error::invalid(format!("range '{spec}' is empty")));
        }
        if count > 1e6 {
            return Err(Error::invalid(format!(
                "range '{spec}' has too many points"
            )));
        }
        let mut out: Vec<f64> = (0..=count as u64)
            .map(|k| snap(start + k as f64 * step))
            .collect();
        // endpoint within 1e-12 counts as included
        if let Some(last) = out.last_mut() {
            if (*last - stop).abs() <= 1e-12 {
                *last = stop;
            }
        }
        out
    } else {
        spec.split(',').map(parse_f64).collect::<Result<Vec<_>>>()?
    };
    strictly_increasing(&values)?;
    Ok(values)
}

/// Reporting probabilities, each in `(0, 1]`.
pub fn parse_alpha_grid(spec: &str) -> Result<Vec<f64>> {
    let v = parse_real_grid(spec)?;
    if let Some(a) = v.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
        return Err(Error::domain(format!("alpha must lie in (0, 1], got {a}")));
    }
    Ok(v)
}

/// Site counts, each at least 1.
pub fn parse_n_grid(spec: &str) -> Result<Vec<usize>> {
    let reals = parse_real_grid(spec)?;
    reals
        .iter()
        .map(|&x| {
            if x >= 1.0 && x.fract() == 0.0 && x <= usize::MAX as f64 {
                Ok(x as usize)
            } else {
                Err(Error::invalid(format!(
                    "site count must be a positive integer, got {x}"
                )))
            }
        })
        .collect()
}
