//! 64-bit mixing used for every derived seed and for keyed permutations.
//!
//! The finalizer is SplitMix64 (Steele, Lea and Flood): a Weyl increment
//! followed by two xor-shift-multiply rounds. Seeds for sub-tasks are chained
//! as `derive(derive(master, a), b)`, so the seed of a task depends only on
//! its coordinates (method, option, replication) and never on scheduling.

/// Golden-ratio Weyl increment.
pub const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer. A bijection on `u64`.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a tag.
#[inline]
pub fn derive(parent: u64, tag: u64) -> u64 {
    mix64(parent.wrapping_add(GOLDEN).wrapping_add(mix64(tag.wrapping_mul(GOLDEN) ^ 0x5851_f42d_4c95_7f2d)))
}

/// Derives a seed from a path of tags, e.g. `[method, option, replication]`.
pub fn derive_path(master: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(mix64(master), |acc, &t| derive(acc, t))
}

/// Stable tag for a string label (FNV-1a), used to key methods by name.
pub fn label_tag(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// SplitMix64 generator. Used for small keyed streams (permutation shuffles,
/// shift digits) where a full counter-based generator would be overkill.
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
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform integer in `0..bound` by multiply-high (Lemire), bias < bound / 2^64.
    #[inline]
    pub fn below(&mut self, bound: u32) -> u32 {
        ((u128::from(self.next_u64()) * u128::from(bound)) >> 64) as u32
    }
}
