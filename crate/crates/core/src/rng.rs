//! Portable seeded random numbers.
//!
//! Every randomized routine in the crate draws from SplitMix64 so that a seed
//! pins the output bit-for-bit on any platform or language. The generator
//! state advances by `0x9E3779B97F4A7C15` per draw and each output is mixed by
//!
//! ```text
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z =  z ^ (z >> 31)
//! ```
//!
//! Uniform doubles take the top 53 bits: `(next_u64() >> 11) * 2^-53`, which
//! lies in `[0, 1)`. Gaussian draws use the Box-Muller cosine branch on two
//! consecutive uniforms `u1, u2`: `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

#[derive(Debug, Clone)]
pub struct ScenarioRng {
    inner: SplitMix64,
}

impl ScenarioRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: SplitMix64::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi]`; returns `lo` exactly when the interval is degenerate.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        let u = self.uniform();
        if hi == lo {
            return lo;
        }
        (lo + (hi - lo) * u).min(hi)
    }

    /// Standard normal draw.
    pub fn gaussian(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
