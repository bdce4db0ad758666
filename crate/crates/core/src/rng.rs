//! Counter-based pseudo-random uniforms for plain Monte Carlo.
//!
//! A stream is ChaCha8 keyed by 32 bytes expanded from `seed` with
//! SplitMix64, on ChaCha stream `stream`. Row `j` of a `d`-dimensional stream
//! starts at 32-bit word `2 * d * j`, so any index range can be generated
//! independently and matches sequential generation exactly.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::mix::SplitMix64;

#[derive(Debug, Clone)]
pub struct UniformStream {
    key: [u8; 32],
    stream: u64,
    dim: usize,
}

impl UniformStream {
    pub fn new(seed: u64, stream: u64, dim: usize) -> Self {
        let mut g = SplitMix64::new(seed);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&g.next_u64().to_le_bytes());
        }
        Self { key, stream, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Fills `out` with rows `position, position + 1, ...`; values lie in
    /// the open interval `(0, 1)`.
    pub fn fill(&self, position: u64, out: &mut [f64]) {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(self.stream);
        rng.set_word_pos(u128::from(position) * self.dim as u128 * 2);
        for v in out.iter_mut() {
            *v = to_open_unit(rng.next_u64());
        }
    }
}

/// Top 52 bits, centred in their cell: `(k + 1/2) 2^-52`. Exact in a double.
#[inline]
pub fn to_open_unit(x: u64) -> f64 {
    ((x >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}
