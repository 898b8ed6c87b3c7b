//! Deterministic random-number streams.
//!
//! A stream is identified by `(seed, stream_index)`. Equal identifiers
//! reproduce the same variate sequence bit for bit; distinct stream indices
//! give statistically independent sequences (ChaCha8 keyed by the seed with
//! the index as its 64-bit stream counter). Monte Carlo drivers bind
//! `stream_index = path index`, which makes every ensemble result
//! independent of how paths are scheduled across workers.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::math::{ln, sqrt};

/// An owned, deterministic variate stream.
///
/// A stream must be exclusively owned by one worker at a time; hand it off,
/// never share it concurrently.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_index);
        Self {
            seed,
            stream_index,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform variate on `(0, 1]` (53-bit resolution, never exactly zero).
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal variate by the Marsaglia polar method.
    pub fn standard_normal(&mut self) -> f64 {
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                return u * sqrt(-2.0 * ln(s) / s);
            }
        }
    }

    /// ±1 with probability 1/2 each.
    pub fn rademacher(&mut self) -> i8 {
        if self.next_u64() >> 63 == 0 {
            1
        } else {
            -1
        }
    }
}

/// A contiguous block of stream indices under one seed.
///
/// Ensemble operations draw the stream for path `k` as
/// `RngStream::new(seed, base_index + k)`, so a block both documents and
/// reserves the index range it consumes.
#[derive(Clone, Copy, Debug)]
pub struct StreamBlock {
    pub seed: u64,
    pub base_index: u64,
}

impl StreamBlock {
    pub fn new(seed: u64, base_index: u64) -> Self {
        Self { seed, base_index }
    }

    pub fn stream(&self, k: u64) -> RngStream {
        RngStream::new(self.seed, self.base_index + k)
    }

    /// The block starting right after `n` indices of this one.
    pub fn offset(&self, n: u64) -> Self {
        Self {
            seed: self.seed,
            base_index: self.base_index + n,
        }
    }
}
