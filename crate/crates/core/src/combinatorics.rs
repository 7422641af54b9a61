//! Exact integer combinatorics behind the uniform-weight moment formulas.
//!
//! The coefficient of `α^m` in `E S^l` counts the ways of dropping `l`
//! distinguishable balls into `N` bins so that exactly `m` bins are
//! occupied: `{l over m} · N!/(N−m)!`. Both factors are computed here in
//! exact integer arithmetic.

use crate::error::{Error, Result};

/// Largest `l` for which [`stirling2`] is defined. Every entry of row 25
/// fits comfortably in a `u128`.
pub const STIRLING_CAP: u32 = 25;

/// Stirling number of the second kind `{l over m}`: the number of partitions
/// of `l` distinguishable elements into exactly `m` nonempty sets.
///
/// Computed with the recurrence `{l, m} = m·{l−1, m} + {l−1, m−1}`.
pub fn stirling2(l: u32, m: u32) -> Result<u128> {
    check_row(l)?;
    if m > l {
        return Ok(0);
    }
    if m == 0 {
        return Ok(0);
    }
    let m = m as usize;
    // row[j] holds {i, j} for the current i
    let mut row = vec![0u128; m + 1];
    row[0] = 1; // {0, 0}
    for i in 1..=l as usize {
        let upper = i.min(m);
        for j in (1..=upper).rev() {
            row[j] = (j as u128) * row[j] + row[j - 1];
        }
        row[0] = 0;
    }
    Ok(row[m])
}

/// `n·(n−1)·…·(n−m+1)`, the empty product being 1.
pub fn falling_factorial(n: u64, m: u64) -> Result<u128> {
    if m > n {
        return Err(Error::domain(format!(
            "falling factorial needs m <= n, got n={n}, m={m}"
        )));
    }
    let mut acc: u128 = 1;
    for k in 0..m {
        acc = acc
            .checked_mul(u128::from(n - k))
            .ok_or_else(|| Error::Overflow(format!("falling_factorial({n}, {m})")))?;
    }
    Ok(acc)
}

fn check_row(l: u32) -> Result<()> {
    if l == 0 {
        return Err(Error::domain("stirling2 needs l >= 1"));
    }
    if l > STIRLING_CAP {
        return Err(Error::domain(format!(
            "stirling2 is capped at l <= {STIRLING_CAP}, got l={l}"
        )));
    }
    Ok(())
}

/// Triangle of `{l over m}` for `1 ≤ m ≤ l ≤ max_l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StirlingTable {
    max_l: u32,
    // rows[l-1][m-1] = {l, m}
    rows: Vec<Vec<u128>>,
}

impl StirlingTable {
    pub fn new(max_l: u32) -> Result<Self> {
        check_row(max_l)?;
        let mut rows: Vec<Vec<u128>> = Vec::with_capacity(max_l as usize);
        rows.push(vec![1]);
        for l in 2..=max_l as usize {
            let prev = &rows[l - 2];
            let row = (1..=l)
                .map(|m| {
                    let same = if m < l { prev[m - 1] } else { 0 };
                    let below = if m >= 2 { prev[m - 2] } else { 0 };
                    (m as u128) * same + below
                })
                .collect();
            rows.push(row);
        }
        Ok(Self { max_l, rows })
    }

    pub fn max_l(&self) -> u32 {
        self.max_l
    }

    /// `{l over m}`; zero outside `1 ≤ m ≤ l`. Panics if `l` exceeds `max_l`.
    pub fn get(&self, l: u32, m: u32) -> u128 {
        assert!(
            l <= self.max_l,
            "row {l} outside table of {} rows",
            self.max_l
        );
        if l == 0 || m == 0 || m > l {
            return 0;
        }
        self.rows[l as usize - 1][m as usize - 1]
    }

    pub fn row(&self, l: u32) -> &[u128] {
        &self.rows[l as usize - 1]
    }
}
