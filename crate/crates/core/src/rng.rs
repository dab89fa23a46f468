//! Deterministic sampling helpers.
//!
//! Reports must be byte-identical across runs, so every randomized sweep
//! uses a ChaCha stream with a fixed seed.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform in [lo, hi) with |value| >= floor (rejection).
    pub fn range_away_from_zero(&mut self, lo: f64, hi: f64, floor: f64) -> f64 {
        loop {
            let v = self.range(lo, hi);
            if v.abs() >= floor {
                return v;
            }
        }
    }
}
