//! Counter-based random streams.
//!
//! Every random number is a pure function of a 64-bit key and a counter:
//!
//! ```text
//! bits(key, c) = mix64(key + (c + 1)·γ)      γ = 0x9E3779B97F4A7C15
//! uniform      = (bits >> 11) · 2⁻⁵³          in [0, 1)
//! ```
//!
//! `mix64` is the SplitMix64 finalizer. Keys are derived hierarchically,
//! `child(key, i) = mix64(key ^ mix64(i·γ + γ))`, starting from
//! `child(domain_tag, seed)`. Ensemble member `m` on attempt `a` uses
//! `child(child(root, m), a)` and site `i` is counter `i`. Any member can
//! therefore be regenerated in isolation, and scheduling cannot change
//! results.

/// Weyl increment of SplitMix64.
pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn child_key(parent: u64, index: u64) -> u64 {
    mix64(parent ^ mix64(index.wrapping_mul(GAMMA).wrapping_add(GAMMA)))
}

/// Separates the streams used for different purposes under one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Ensemble,
    Subset,
    Synthetic,
    Tail,
}

impl Domain {
    fn tag(self) -> u64 {
        match self {
            Domain::Ensemble => 0x656E_7365_6D62_6C65,
            Domain::Subset => 0x7375_6273_6574_0000,
            Domain::Synthetic => 0x7379_6E74_6865_7469,
            Domain::Tail => 0x7461_696C_0000_0000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stream {
    key: u64,
}

impl Stream {
    pub fn new(seed: u64, domain: Domain) -> Self {
        Self {
            key: child_key(domain.tag(), seed),
        }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn substream(&self, index: u64) -> Self {
        Self {
            key: child_key(self.key, index),
        }
    }

    #[inline]
    pub fn bits(&self, counter: u64) -> u64 {
        mix64(
            self.key
                .wrapping_add(counter.wrapping_add(1).wrapping_mul(GAMMA)),
        )
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&self, counter: u64) -> f64 {
        (self.bits(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn bernoulli(&self, counter: u64, p: f64) -> bool {
        self.uniform(counter) < p
    }

    /// Integer in `[0, bound)` by 64×64→128 multiply-shift.
    #[inline]
    pub fn below(&self, counter: u64, bound: u64) -> u64 {
        ((u128::from(self.bits(counter)) * u128::from(bound)) >> 64) as u64
    }

    /// Standard normal by Box–Muller from counters `2c` and `2c + 1`.
    pub fn normal(&self, counter: u64) -> f64 {
        let u1 = 1.0 - self.uniform(2 * counter);
        let u2 = self.uniform(2 * counter + 1);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// `k` distinct indices from `0..n`, by a partial Fisher–Yates shuffle.
pub fn sample_without_replacement(stream: &Stream, n: usize, k: usize) -> Vec<usize> {
    assert!(k <= n, "cannot draw {k} of {n} without replacement");
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + stream.below(i as u64, (n - i) as u64) as usize;
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}
