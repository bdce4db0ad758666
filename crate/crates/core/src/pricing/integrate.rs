//! Block-deterministic integration of vector-valued integrands.
//!
//! Points are processed in fixed blocks of [`BLOCK`] rows. Each block is
//! summed left to right and block totals are then combined in block order,
//! so results do not depend on how many threads evaluate the blocks.

use crate::lds::{LdsError, PointSet, Sequence};

use super::PricingError;

pub const BLOCK: usize = 4096;

/// Source of rows of a point set, addressable by position.
pub trait PointSource: Sync {
    fn dim(&self) -> usize;
    fn fill(&self, position: u64, out: &mut [f64]) -> Result<(), LdsError>;
}

impl PointSource for Sequence {
    fn dim(&self) -> usize {
        Sequence::dim(self)
    }

    fn fill(&self, position: u64, out: &mut [f64]) -> Result<(), LdsError> {
        Sequence::fill(self, position, out)
    }
}

impl PointSource for PointSet {
    fn dim(&self) -> usize {
        PointSet::dim(self)
    }

    fn fill(&self, position: u64, out: &mut [f64]) -> Result<(), LdsError> {
        let start = position as usize * self.dim();
        let src = self
            .as_slice()
            .get(start..start + out.len())
            .ok_or_else(|| LdsError::Shape(format!("rows from {position} exceed the point set of {} rows", self.len())))?;
        out.copy_from_slice(src);
        Ok(())
    }
}

/// Integrand with several outputs sharing one evaluation per point.
pub trait Integrand: Sync {
    type Scratch: Send;

    fn dim(&self) -> usize;
    fn outputs(&self) -> usize;
    fn scratch(&self) -> Self::Scratch;
    fn eval(&self, u: &[f64], scratch: &mut Self::Scratch, out: &mut [f64]);
}

/// Running sums of values and squared values per output.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub sum: Vec<f64>,
    pub sum_sq: Vec<f64>,
}

impl Moments {
    pub fn zero(outputs: usize) -> Self {
        Moments { n: 0, sum: vec![0.0; outputs], sum_sq: vec![0.0; outputs] }
    }

    fn absorb(&mut self, other: &Moments) {
        self.n += other.n;
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *a += b;
        }
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.sum[i] / self.n as f64
    }

    /// Sample standard error `s/√n` of output `i`.
    pub fn std_error(&self, i: usize) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let mean = self.mean(i);
        let var = ((self.sum_sq[i] - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

fn block_moments<S: PointSource, F: Integrand>(source: &S, f: &F, start: usize, rows: usize) -> Result<Moments, LdsError> {
    let d = f.dim();
    let k = f.outputs();
    let mut points = vec![0.0; rows * d];
    source.fill(start as u64, &mut points)?;
    let mut scratch = f.scratch();
    let mut out = vec![0.0; k];
    let mut m = Moments::zero(k);
    m.n = rows;
    for u in points.chunks_exact(d) {
        f.eval(u, &mut scratch, &mut out);
        for ((s, q), &v) in m.sum.iter_mut().zip(m.sum_sq.iter_mut()).zip(&out) {
            *s += v;
            *q += v * v;
        }
    }
    Ok(m)
}

/// Integrates `f` over rows `0..n` of `source`.
pub fn integrate<S: PointSource, F: Integrand>(source: &S, n: usize, f: &F) -> Result<Moments, PricingError> {
    if source.dim() != f.dim() {
        return Err(PricingError::Dimension { expected: f.dim(), got: source.dim() });
    }
    let blocks: Vec<(usize, usize)> = (0..n.div_ceil(BLOCK)).map(|b| (b * BLOCK, BLOCK.min(n - b * BLOCK))).collect();
    #[cfg(feature = "parallel")]
    let parts: Vec<Result<Moments, LdsError>> = {
        use rayon::prelude::*;
        blocks.par_iter().map(|&(start, rows)| block_moments(source, f, start, rows)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Result<Moments, LdsError>> =
        blocks.iter().map(|&(start, rows)| block_moments(source, f, start, rows)).collect();
    let mut total = Moments::zero(f.outputs());
    for part in parts {
        total.absorb(&part?);
    }
    Ok(total)
}
