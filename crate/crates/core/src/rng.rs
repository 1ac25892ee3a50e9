//! Deterministic per-item random streams.
//!
//! Every augmented item owns one [`RngStream`] derived from the run's master
//! seed and the item's stream index. The generator is ChaCha8 keyed from the
//! master seed with the stream index selecting ChaCha's 64-bit stream id, so
//! any item's draws can be reproduced without generating the ones before it.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            inner,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// `lo + (hi - lo) * u` for `u` uniform in `[0, 1)`; returns `lo` when the
    /// range is degenerate.
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        let u = self.uniform();
        lo + (hi - lo) * u
    }

    /// Uniform integer in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        self.inner.random_range(0..n)
    }

    /// `true` with probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }
}

/// The stream owned by item `item_index` of a run seeded with `master_seed`.
pub fn derive_stream(master_seed: u64, item_index: u64) -> RngStream {
    RngStream::new(master_seed, item_index)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn draws(seed: u64, index: u64, n: usize) -> Vec<u64> {
        let mut s = derive_stream(seed, index);
        (0..n).map(|_| s.next_u64()).collect()
    }

    #[test]
    fn same_pair_same_draws() {
        assert_eq!(draws(7, 0, 100), draws(7, 0, 100));
    }

    #[test]
    fn distinct_index_distinct_draws() {
        assert_ne!(draws(7, 0, 100), draws(7, 1, 100));
        assert_ne!(draws(7, 0, 100), draws(8, 0, 100));
    }

    // Pins the generator so a dependency bump that changes the stream shows up
    // as a test failure instead of silently changing every manifest.
    #[test]
    fn stream_is_pinned() {
        let mut reference = ChaCha8Rng::seed_from_u64(42);
        reference.set_stream(3);
        let expected: Vec<u64> = (0..8).map(|_| reference.next_u64()).collect();
        assert_eq!(draws(42, 3, 8), expected);
        // Frozen so that a dependency upgrade that changes the stream is caught.
        assert_eq!(
            draws(42, 3, 3),
            [6_672_028_999_979_260_041u64, 10_928_159_205_316_631_748, 13_467_973_396_282_439_615]
        );
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut s = derive_stream(1, 1);
        for _ in 0..10_000 {
            let u = s.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn bernoulli_endpoints() {
        let mut s = derive_stream(5, 9);
        for _ in 0..1_000 {
            assert!(s.bernoulli(1.0));
            assert!(!s.bernoulli(0.0));
        }
    }

    #[test]
    fn degenerate_range_returns_lo() {
        let mut s = derive_stream(0, 0);
        assert_eq!(s.uniform_range(0.25, 0.25), 0.25);
    }
}
