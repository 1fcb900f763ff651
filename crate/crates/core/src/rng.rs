//! Seeded, platform-independent randomness.
//!
//! Every random choice in the crate flows through [`SeededRng`]. Independent
//! streams for parties and trials are derived by hashing
//! `(seed, party, trial)`, so batches can be split across threads without
//! sharing mutable generator state.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Party identifiers used when deriving streams.
pub mod party {
    pub const SHARED: u64 = 0;
    pub const ALICE: u64 = 1;
    pub const BOB: u64 = 2;
    pub const REFEREE: u64 = 3;
    pub const CAROL: u64 = 4;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a seed with a party id and a trial index into a new seed.
pub fn derive_seed(seed: u64, party: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ party) ^ trial.rotate_left(17))
}

#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for `(party, trial)` under a master seed.
    pub fn derive(seed: u64, party: u64, trial: u64) -> Self {
        SeededRng::new(derive_seed(seed, party, trial))
    }

    /// Child stream of this generator's seed (does not advance `self`).
    pub fn fork(&self, party: u64, trial: u64) -> Self {
        SeededRng::derive(self.seed, party, trial)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn bit(&mut self) -> bool {
        self.inner.next_u32() & 1 == 1
    }

    /// Uniform in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    /// Standard normal deviate.
    pub fn normal(&mut self) -> f64 {
        self.inner.sample(rand_distr::StandardNormal)
    }

    /// `true` with probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Uniformly random `k`-subset of `0..n`, in sampling order.
    pub fn sample_distinct(&mut self, n: usize, k: usize) -> Vec<usize> {
        rand::seq::index::sample(&mut self.inner, n, k).into_vec()
    }

    /// Index drawn with probability proportional to `weights` (negative
    /// entries count as zero). Falls back to the last positive entry when
    /// rounding leaves the draw past the end.
    pub fn weighted_index(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().map(|w| w.max(0.0)).sum();
        let mut u = self.uniform() * total;
        let mut last = 0;
        for (i, &w) in weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            last = i;
            if u < w {
                return i;
            }
            u -= w;
        }
        last
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        use rand::seq::SliceRandom;
        items.shuffle(&mut self.inner);
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
