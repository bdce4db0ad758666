//! Digit randomization of digital sequences.
//!
//! Nested-uniform (Owen) scrambling permutes digit `k` of a coordinate with a
//! permutation keyed on `(seed, coordinate, digits 1..k-1)`. Permutations are
//! never stored; each one is re-derived from [`mix64`] when needed:
//!
//! * base 2: the permutation of `{0, 1}` at tree node `prefix` is a flip bit,
//!   `mix64(key ^ node * GOLDEN) >> 63`, with `node = (1 << (k-1)) | prefix`;
//! * base `b > 2`: a Fisher-Yates shuffle of `0..b` driven by SplitMix64
//!   seeded with a hash chain `h_k = derive(h_{k-1}, y_{k-1})` over the
//!   original digits.
//!
//! Digital shift adds one random digit vector per coordinate (xor in base 2,
//! digit-wise addition mod `b` otherwise).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::digits::{assemble, extract_digits, pow2_neg, recoverable_digits};
use super::sobol::bits_to_unit;
use super::{LdsError, PointSet};
use crate::mix::{derive, mix64, SplitMix64, GOLDEN};

const NESTED_TAG: u64 = 0x6f77_656e_5f6e_6573;
const SHIFT_TAG: u64 = 0x7368_6966_745f_6469;
const SUBTREE: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScrambleMode {
    #[default]
    None,
    DigitalShift,
    NestedUniform,
}

impl fmt::Display for ScrambleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScrambleMode::None => "none",
            ScrambleMode::DigitalShift => "digital-shift",
            ScrambleMode::NestedUniform => "nested-uniform",
        })
    }
}

impl FromStr for ScrambleMode {
    type Err = LdsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(ScrambleMode::None),
            "shift" | "digital-shift" => Ok(ScrambleMode::DigitalShift),
            "owen" | "nested-uniform" => Ok(ScrambleMode::NestedUniform),
            other => Err(LdsError::UnknownMode(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ScrambleSpec {
    pub mode: ScrambleMode,
    pub seed: u64,
    /// Digits randomized per coordinate; `None` means 32 in base 2 and 16
    /// otherwise.
    pub depth: Option<u32>,
}

impl ScrambleSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn owen(seed: u64) -> Self {
        Self { mode: ScrambleMode::NestedUniform, seed, depth: None }
    }

    pub fn shift(seed: u64) -> Self {
        Self { mode: ScrambleMode::DigitalShift, seed, depth: None }
    }

    pub fn is_none(&self) -> bool {
        self.mode == ScrambleMode::None
    }
}

/// A validated [`ScrambleSpec`] ready to randomize digits.
#[derive(Debug, Clone)]
pub struct Scrambler {
    spec: ScrambleSpec,
}

impl Scrambler {
    pub fn new(spec: ScrambleSpec) -> Result<Self, LdsError> {
        if let Some(depth) = spec.depth {
            if depth == 0 || depth > 63 {
                return Err(LdsError::InvalidDepth(depth));
            }
        }
        Ok(Self { spec })
    }

    pub fn spec(&self) -> &ScrambleSpec {
        &self.spec
    }

    /// Digits randomized in base `b`. Larger bases are capped so that every
    /// scrambled value assembles exactly in a double.
    pub fn depth_for(&self, base: u32) -> u32 {
        if base == 2 {
            self.spec.depth.unwrap_or(32)
        } else {
            self.spec.depth.unwrap_or(16).min(recoverable_digits(base))
        }
    }

    fn coordinate_key(&self, coord: usize) -> u64 {
        derive(self.spec.seed, coord as u64)
    }

    /// Randomizes a base-2 digit word of `depth` digits (first digit in bit
    /// `depth - 1`).
    #[inline]
    pub fn scramble_bits(&self, coord: usize, y: u64, depth: u32) -> u64 {
        self.scramble_bits_keyed(self.coordinate_key(coord), y, depth)
    }

    /// Per-coordinate keys for [`Scrambler::scramble_bits_keyed`].
    pub(crate) fn coordinate_keys(&self, d: usize) -> Vec<u64> {
        (0..d).map(|i| self.coordinate_key(i)).collect()
    }

    #[inline]
    pub(crate) fn scramble_bits_keyed(&self, coord_key: u64, y: u64, depth: u32) -> u64 {
        match self.spec.mode {
            ScrambleMode::None => y,
            ScrambleMode::DigitalShift => {
                let mask = if depth == 64 { u64::MAX } else { (1u64 << depth) - 1 };
                y ^ (mix64(coord_key ^ SHIFT_TAG) & mask)
            }
            ScrambleMode::NestedUniform => {
                // One hash covers a complete subtree of SUBTREE levels: the
                // node at relative level j with path bits `idx` below the
                // subtree root reads bit (2^j - 1 + idx).
                let key = coord_key ^ NESTED_TAG;
                let mut flips = 0u64;
                let mut k = 0;
                while k < depth {
                    let levels = SUBTREE.min(depth - k);
                    let prefix = if k == 0 { 0 } else { y >> (depth - k) };
                    let root = (1u64 << k) | prefix;
                    let h = mix64(key ^ root.wrapping_mul(GOLDEN));
                    // Path below the subtree root, left-aligned to SUBTREE bits.
                    let path = ((y >> (depth - k - levels)) & ((1u64 << levels) - 1)) << (SUBTREE - levels);
                    let mut chunk = 0u64;
                    for j in 0..SUBTREE {
                        let idx = (path >> (SUBTREE - j)) & ((1u64 << j) - 1);
                        chunk |= ((h >> ((1u64 << j) - 1 + idx)) & 1) << (SUBTREE - 1 - j);
                    }
                    flips |= (chunk >> (SUBTREE - levels)) << (depth - k - levels);
                    k += levels;
                }
                y ^ flips
            }
        }
    }

    /// Randomizes `digits` (most significant first) of a base-`b` coordinate
    /// in place. `perm` is scratch space.
    pub fn scramble_digits(&self, coord: usize, base: u32, digits: &mut [u32], perm: &mut Vec<u32>) {
        match self.spec.mode {
            ScrambleMode::None => {}
            ScrambleMode::DigitalShift => {
                let mut rng = SplitMix64::new(self.coordinate_key(coord) ^ SHIFT_TAG);
                for y in digits.iter_mut() {
                    *y = (*y + rng.below(base)) % base;
                }
            }
            ScrambleMode::NestedUniform => {
                let mut h = self.coordinate_key(coord) ^ NESTED_TAG;
                for y in digits.iter_mut() {
                    let original = *y;
                    let mut rng = SplitMix64::new(h);
                    perm.clear();
                    perm.extend(0..base);
                    for i in (1..base as usize).rev() {
                        let j = rng.below(i as u32 + 1) as usize;
                        perm.swap(i, j);
                    }
                    *y = perm[original as usize];
                    h = derive(h, u64::from(original));
                }
            }
        }
    }

    /// Scrambled value of a coordinate given its native digits `y_1..y_K`
    /// (most significant first) in base `b`.
    pub(crate) fn scramble_native(
        &self,
        coord: usize,
        base: u32,
        native: &[u32],
        buf: &mut Vec<u32>,
        perm: &mut Vec<u32>,
    ) -> Result<f64, LdsError> {
        let depth = self.depth_for(base);
        if native.len() > depth as usize {
            return Err(LdsError::DigitsExceedDepth { coordinate: coord, depth });
        }
        if base == 2 {
            let y = native.iter().enumerate().fold(0u64, |acc, (r, &bit)| acc | (u64::from(bit) << (depth as usize - 1 - r)));
            return Ok(bits_to_unit(self.scramble_bits(coord, y, depth), depth));
        }
        buf.clear();
        buf.extend_from_slice(native);
        buf.resize(depth as usize, 0);
        self.scramble_digits(coord, base, buf, perm);
        Ok(assemble(base, buf))
    }
}

/// Randomizes an existing point set. Every coordinate must carry a digit base
/// and have no more digits than the scramble depth. Mode `none` returns the
/// input unchanged.
pub fn apply_scramble(points: &PointSet, spec: &ScrambleSpec) -> Result<PointSet, LdsError> {
    let scrambler = Scrambler::new(*spec)?;
    if spec.is_none() {
        return Ok(points.clone());
    }
    let d = points.dim();
    let bases: Vec<u32> = points
        .meta()
        .bases
        .iter()
        .enumerate()
        .map(|(i, b)| b.ok_or(LdsError::NoDigitBase { coordinate: i }))
        .collect::<Result<_, _>>()?;
    let mut perm = Vec::new();
    let mut coords = Vec::with_capacity(points.len() * d);
    for row in points.rows() {
        for (i, (&x, &base)) in row.iter().zip(&bases).enumerate() {
            let depth = scrambler.depth_for(base);
            let value = if base == 2 {
                let t = x / pow2_neg(depth);
                if t.fract() != 0.0 {
                    return Err(LdsError::DigitsExceedDepth { coordinate: i, depth });
                }
                bits_to_unit(scrambler.scramble_bits(i, t as u64, depth), depth)
            } else {
                let mut digits = extract_digits(x, base, depth)
                    .ok_or(LdsError::DigitsExceedDepth { coordinate: i, depth })?;
                scrambler.scramble_digits(i, base, &mut digits, &mut perm);
                assemble(base, &digits)
            };
            coords.push(value);
        }
    }
    let mut meta = points.meta().clone();
    meta.scramble = spec.mode;
    meta.seed = Some(spec.seed);
    PointSet::new(d, coords, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lds::{faure_points, halton_points, Family, PointSetMeta};

    #[test]
    fn none_is_identity() {
        let p = halton_points(100, 4, 0).unwrap();
        let q = apply_scramble(&p, &ScrambleSpec { mode: ScrambleMode::None, seed: 99, depth: None }).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn shift_of_zero_is_the_shift() {
        let s = Scrambler::new(ScrambleSpec::shift(5)).unwrap();
        let shifted = s.scramble_bits(0, 0, 32);
        assert_eq!(shifted, mix64(derive(5, 0) ^ SHIFT_TAG) & 0xffff_ffff);
        // XOR is an involution.
        assert_eq!(s.scramble_bits(0, shifted ^ 0, 32) ^ shifted, shifted);
    }

    #[test]
    fn nested_bits_is_a_bijection_per_prefix() {
        // With depth 8 the scramble permutes all 256 words.
        let s = Scrambler::new(ScrambleSpec { mode: ScrambleMode::NestedUniform, seed: 3, depth: Some(8) }).unwrap();
        let mut seen: Vec<u64> = (0..256).map(|y| s.scramble_bits(2, y, 8)).collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..256).collect::<Vec<_>>());
        // Two words sharing the first k digits still share them after scrambling.
        let a = s.scramble_bits(2, 0b1011_0000, 8);
        let b = s.scramble_bits(2, 0b1011_1111, 8);
        assert_eq!(a >> 4, b >> 4);
    }

    #[test]
    fn nested_digits_preserve_prefix_structure() {
        let s = Scrambler::new(ScrambleSpec::owen(11)).unwrap();
        let mut perm = Vec::new();
        let mut a = vec![3, 1, 4, 0];
        let mut b = vec![3, 1, 2, 2];
        s.scramble_digits(1, 5, &mut a, &mut perm);
        s.scramble_digits(1, 5, &mut b, &mut perm);
        assert_eq!(a[..2], b[..2]);
        assert_ne!(a[2], b[2]);
    }

    #[test]
    fn needs_bases() {
        let meta = PointSetMeta::new(Family::External, vec![None], 0);
        let p = PointSet::new(1, vec![0.5], meta).unwrap();
        assert!(matches!(apply_scramble(&p, &ScrambleSpec::owen(1)), Err(LdsError::NoDigitBase { coordinate: 0 })));
        let meta = PointSetMeta::new(Family::External, vec![Some(2)], 0);
        let p = PointSet::new(1, vec![0.1], meta).unwrap();
        assert!(matches!(apply_scramble(&p, &ScrambleSpec::owen(1)), Err(LdsError::DigitsExceedDepth { .. })));
        assert!(Scrambler::new(ScrambleSpec { mode: ScrambleMode::NestedUniform, seed: 0, depth: Some(0) }).is_err());
        assert!("scramble".parse::<ScrambleMode>().is_err());
    }

    #[test]
    fn deterministic_and_in_range() {
        let p = faure_points(200, 5, 624).unwrap();
        let spec = ScrambleSpec::owen(42);
        let a = apply_scramble(&p, &spec).unwrap();
        let b = apply_scramble(&p, &spec).unwrap();
        assert_eq!(a, b);
        assert!(a.as_slice().iter().all(|x| (0.0..1.0).contains(x)));
        assert_ne!(a.as_slice(), p.as_slice());
        let c = apply_scramble(&p, &ScrambleSpec::owen(43)).unwrap();
        assert_ne!(a.as_slice(), c.as_slice());
    }
}
