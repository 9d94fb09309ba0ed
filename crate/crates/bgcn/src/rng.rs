//! Deterministic, splittable random number generation.
//!
//! Everything stochastic in this crate is driven by a single master seed
//! through the derivation scheme below, so any subset of the work (one
//! training job, one graph sample, one dropout pass) can be recomputed
//! independently of the rest.
//!
//! The scheme is counter-based: a child seed is the SplitMix64 finalizer
//! applied to the parent seed combined with a mixed label,
//!
//! ```text
//! child = mix64(parent ^ mix64(label + GOLDEN_GAMMA))
//! ```
//!
//! and deeper levels chain `derive` calls. The fixed stream labels used by
//! the library live in [`stream`]:
//!
//! ```text
//! master ─ derive(stream::BASE_CLASSIFIER)            base GCNN training
//!        ─ derive(stream::ZETA) ─ derive(v)           zeta sample v
//!        ─ derive(stream::GRAPH_SAMPLE) ─ v ─ i       graph sample (v, i)
//!        ─ derive(stream::WEIGHT_TRAINING) ─ v ─ i    GCNN training on (v, i)
//!        ─ derive(stream::MC_DROPOUT) ─ v ─ i ─ s     dropout pass s on (v, i)
//!        ─ derive(stream::SPLIT) ─ trial              per-trial random split
//!        ─ derive(stream::TRIAL) ─ trial ─ method     per-trial method seed
//! ```
//!
//! Within a training run the seed splits once more into
//! `stream::WEIGHT_INIT` (Glorot draws) and `stream::DROPOUT_MASKS`
//! (per-epoch masks).

/// Weyl increment of SplitMix64.
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a bijective mix with good avalanche behaviour.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and a label.
#[inline]
pub fn derive(parent: u64, label: u64) -> u64 {
    mix64(parent ^ mix64(label.wrapping_add(GOLDEN_GAMMA)))
}

/// Convenience for two-level derivation.
#[inline]
pub fn derive2(parent: u64, a: u64, b: u64) -> u64 {
    derive(derive(parent, a), b)
}

/// Convenience for three-level derivation.
#[inline]
pub fn derive3(parent: u64, a: u64, b: u64, c: u64) -> u64 {
    derive(derive2(parent, a, b), c)
}

/// Stream labels for the derivation tree (see module docs).
pub mod stream {
    pub const BASE_CLASSIFIER: u64 = 1;
    pub const ZETA: u64 = 2;
    pub const GRAPH_SAMPLE: u64 = 3;
    pub const WEIGHT_TRAINING: u64 = 4;
    pub const MC_DROPOUT: u64 = 5;
    pub const SPLIT: u64 = 6;
    pub const TRIAL: u64 = 7;
    pub const WEIGHT_INIT: u64 = 8;
    pub const DROPOUT_MASKS: u64 = 9;
}

/// SplitMix64 generator. Fast, non-cryptographic, fully reproducible.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        const DEN: f64 = (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 / DEN
    }

    /// Uniform double in [lo, hi).
    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0) is undefined");
        let n = n as u64;
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return (x % n) as usize;
            }
        }
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

/// FNV-1a over bytes; used for stable content hashes in persisted output.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
