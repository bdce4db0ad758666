use serde::{Deserialize, Serialize};

use super::digits::{check_base, radical_inverse_unchecked};
use super::faure::FaureGenerator;
use super::primes::{check_dim, faure_base, first_primes};
use super::scramble::Scrambler;
use super::sobol::{bits_to_unit, build_sobol_matrices, SobolParams, SobolTable};
use super::{Family, LdsError, PointSet, PointSetMeta, ScrambleSpec};
use crate::rng::UniformStream;

/// Everything needed to reproduce a stream of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub family: Family,
    pub dim: usize,
    pub skip: u64,
    #[serde(default)]
    pub include_origin: bool,
    #[serde(default)]
    pub scramble: ScrambleSpec,
    /// Van der Corput base; ignored by other families.
    #[serde(default)]
    pub base: Option<u32>,
    /// Seed of the pseudo-random family.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_sobol_depth")]
    pub sobol_depth: u32,
}

fn default_sobol_depth() -> u32 {
    32
}

impl SequenceSpec {
    /// Unscrambled spec with the family's default burn-in.
    pub fn new(family: Family, dim: usize) -> Self {
        Self {
            family,
            dim,
            skip: default_skip(family, dim),
            include_origin: false,
            scramble: ScrambleSpec::none(),
            base: None,
            seed: 0,
            sobol_depth: default_sobol_depth(),
        }
    }

    pub fn with_skip(mut self, skip: u64) -> Self {
        self.skip = skip;
        self
    }

    pub fn with_scramble(mut self, scramble: ScrambleSpec) -> Self {
        self.scramble = scramble;
        self
    }

    pub fn with_origin(mut self, include: bool) -> Self {
        self.include_origin = include;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Default burn-in: 256 for Sobol', `b^4` for Faure, none otherwise.
pub fn default_skip(family: Family, dim: usize) -> u64 {
    match family {
        Family::Sobol => 256,
        Family::Faure => faure_base(dim).map(|b| u64::from(b).pow(4)).unwrap_or(0),
        _ => 0,
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Radical(Vec<u32>),
    Faure(FaureGenerator),
    Sobol(SobolParams),
    Random(UniformStream),
}

/// A prepared, immutable point stream. Position `p` is
/// `omega = skip + p + 1`, or `skip + p` when the origin is included.
#[derive(Debug, Clone)]
pub struct Sequence {
    spec: SequenceSpec,
    kind: Kind,
    scrambler: Option<Scrambler>,
    start: u64,
}

impl Sequence {
    /// Builds a stream; Sobol' parameters come from `table`, or from
    /// [`SobolTable::active`] when `None`.
    pub fn new(spec: SequenceSpec, table: Option<&SobolTable>) -> Result<Self, LdsError> {
        check_dim(spec.dim)?;
        let kind = match spec.family {
            Family::VanDerCorput => {
                if spec.dim != 1 {
                    return Err(LdsError::Shape(format!("Van der Corput is one-dimensional, got d = {}", spec.dim)));
                }
                let b = spec.base.unwrap_or(2);
                check_base(b)?;
                Kind::Radical(vec![b])
            }
            Family::Halton => Kind::Radical(first_primes(spec.dim)?.to_vec()),
            Family::Faure => Kind::Faure(FaureGenerator::new(spec.dim)?),
            Family::Sobol => {
                let table = match table {
                    Some(t) => t,
                    None => SobolTable::active()?,
                };
                Kind::Sobol(build_sobol_matrices(table, spec.dim, spec.sobol_depth)?)
            }
            Family::Random => {
                if !spec.scramble.is_none() {
                    return Err(LdsError::NoDigitBase { coordinate: 0 });
                }
                Kind::Random(UniformStream::new(spec.seed, 0, spec.dim))
            }
            Family::Hammersley | Family::External => {
                return Err(LdsError::UnknownFamily(format!("{} is not an extensible sequence", spec.family)))
            }
        };
        let scrambler = if spec.scramble.is_none() { None } else { Some(Scrambler::new(spec.scramble)?) };
        let start = spec.skip + u64::from(!spec.include_origin);
        Ok(Self { spec, kind, scrambler, start })
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn bases(&self) -> Vec<Option<u32>> {
        match &self.kind {
            Kind::Radical(b) => b.iter().map(|&b| Some(b)).collect(),
            Kind::Faure(g) => vec![Some(g.base); self.dim()],
            Kind::Sobol(_) => vec![Some(2); self.dim()],
            Kind::Random(_) => vec![None; self.dim()],
        }
    }

    /// Writes rows `position, position + 1, ...` into `out` (row-major,
    /// length a multiple of the dimension).
    pub fn fill(&self, position: u64, out: &mut [f64]) -> Result<(), LdsError> {
        let d = self.dim();
        let count = out.len() / d;
        if count == 0 {
            return Ok(());
        }
        let first = self.start + position;
        match &self.kind {
            Kind::Random(stream) => stream.fill(position, out),
            Kind::Sobol(params) => {
                params.check_range(first, count)?;
                let mut bits = vec![0u64; out.len()];
                params.fill_bits(first, count, &mut bits);
                let native = params.depth();
                match &self.scrambler {
                    None => {
                        for (o, &y) in out.iter_mut().zip(&bits) {
                            *o = bits_to_unit(y, native);
                        }
                    }
                    Some(s) => {
                        let depth = s.depth_for(2);
                        if native > depth {
                            return Err(LdsError::DigitsExceedDepth { coordinate: 0, depth });
                        }
                        let keys = s.coordinate_keys(d);
                        for (row, ys) in out.chunks_exact_mut(d).zip(bits.chunks_exact(d)) {
                            for ((o, &y), &key) in row.iter_mut().zip(ys).zip(&keys) {
                                *o = bits_to_unit(s.scramble_bits_keyed(key, y << (depth - native), depth), depth);
                            }
                        }
                    }
                }
            }
            Kind::Radical(bases) => {
                let mut native = Vec::new();
                let (mut buf, mut perm) = (Vec::new(), Vec::new());
                for (row, chunk) in out.chunks_exact_mut(d).enumerate() {
                    let omega = first + row as u64;
                    for (i, (o, &b)) in chunk.iter_mut().zip(bases).enumerate() {
                        *o = match &self.scrambler {
                            None => radical_inverse_unchecked(omega, b),
                            Some(s) => {
                                native.clear();
                                let mut v = omega;
                                while v > 0 {
                                    native.push((v % u64::from(b)) as u32);
                                    v /= u64::from(b);
                                }
                                s.scramble_native(i, b, &native, &mut buf, &mut perm)?
                            }
                        };
                    }
                }
            }
            Kind::Faure(g) => {
                let (mut a, mut y) = g.scratch();
                let (mut buf, mut perm) = (Vec::new(), Vec::new());
                for (row, chunk) in out.chunks_exact_mut(d).enumerate() {
                    let omega = first + row as u64;
                    for (i, o) in chunk.iter_mut().enumerate() {
                        let k = g.digits(omega, i, &mut a, &mut y);
                        *o = match &self.scrambler {
                            None => super::digits::assemble(g.base, &y[..k]),
                            Some(s) => s.scramble_native(i, g.base, &y[..k], &mut buf, &mut perm)?,
                        };
                    }
                }
            }
        }
        Ok(())
    }

    /// Materializes the first `n` points.
    pub fn points(&self, n: usize) -> Result<PointSet, LdsError> {
        if n == 0 {
            return Err(LdsError::EmptyCount);
        }
        let mut coords = vec![0.0; n * self.dim()];
        self.fill(0, &mut coords)?;
        let meta = PointSetMeta {
            family: self.spec.family,
            bases: self.bases(),
            skip: self.spec.skip,
            include_origin: self.spec.include_origin,
            scramble: self.spec.scramble.mode,
            seed: match self.spec.family {
                Family::Random => Some(self.spec.seed),
                _ if self.scrambler.is_some() => Some(self.spec.scramble.seed),
                _ => None,
            },
        };
        PointSet::new(self.dim(), coords, meta)
    }
}
