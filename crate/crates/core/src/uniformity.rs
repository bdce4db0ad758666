//! Uniformity diagnostics: exact star discrepancy for small sets and a
//! chi-square bin test for large ones.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::lds::PointSet;

pub const EXACT_MAX_POINTS: usize = 64;
pub const EXACT_MAX_DIM: usize = 3;
pub const MAX_BINS: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum UniformityError {
    #[error("empty point set")]
    Empty,
    #[error("exact star discrepancy is limited to n <= {EXACT_MAX_POINTS} and d <= {EXACT_MAX_DIM} (got n = {n}, d = {d}); use the statistical chi-square mode instead")]
    TooLarge { n: usize, d: usize },
    #[error("{bins} bins exceeds the limit of {MAX_BINS}")]
    TooManyBins { bins: f64 },
    #[error("bins per axis must be at least 1")]
    NoBins,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscrepancyMethod {
    Exact1d,
    ExactGrid,
    Statistical,
}

impl fmt::Display for DiscrepancyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiscrepancyMethod::Exact1d => "exact-1d",
            DiscrepancyMethod::ExactGrid => "exact-grid",
            DiscrepancyMethod::Statistical => "statistical",
        })
    }
}

/// Anchored box `[0, corner)` at which the supremum is attained. With
/// `closed`, points on the upper faces are counted (the limit from above).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub corner: Vec<f64>,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub n: usize,
    pub d: usize,
    pub dstar: f64,
    pub method: DiscrepancyMethod,
    pub witness: Option<Witness>,
}

impl DiscrepancyReport {
    pub fn csv_header() -> &'static str {
        "n,d,method,dstar"
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{:.16e}", self.n, self.d, self.method, self.dstar)
    }
}

impl fmt::Display for DiscrepancyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {}", "points", self.n)?;
        writeln!(f, "{:<10} {}", "dimension", self.d)?;
        writeln!(f, "{:<10} {}", "method", self.method)?;
        write!(f, "{:<10} {:.12}", "D*", self.dstar)?;
        if let Some(w) = &self.witness {
            let corner: Vec<String> = w.corner.iter().map(|c| format!("{c:.6}")).collect();
            write!(f, "\n{:<10} [0, ({})){}", "witness", corner.join(", "), if w.closed { " closed" } else { "" })?;
        }
        Ok(())
    }
}

/// Deviation `|count/n - vol|` of the anchored box at `corner`, counting
/// points with `x < corner` (or `x <= corner` when `closed`).
pub fn box_deviation(points: &[f64], d: usize, corner: &[f64], closed: bool) -> f64 {
    let n = points.len() / d;
    let count = points
        .chunks_exact(d)
        .filter(|p| p.iter().zip(corner).all(|(&x, &a)| if closed { x <= a } else { x < a }))
        .count();
    let vol: f64 = corner.iter().product();
    (count as f64 / n as f64 - vol).abs()
}

/// Exact star discrepancy of a one-dimensional set (any order).
pub fn star_discrepancy_1d(points: &[f64]) -> Result<DiscrepancyReport, UniformityError> {
    if points.is_empty() {
        return Err(UniformityError::Empty);
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut best = (f64::NEG_INFINITY, 0.0, false);
    for (k, &x) in sorted.iter().enumerate() {
        let i = k as f64 + 1.0;
        let below = x - (i - 1.0) / n;
        let above = i / n - x;
        if below > best.0 {
            best = (below, x, false);
        }
        if above > best.0 {
            best = (above, x, true);
        }
    }
    Ok(DiscrepancyReport {
        n: sorted.len(),
        d: 1,
        dstar: best.0,
        method: DiscrepancyMethod::Exact1d,
        witness: Some(Witness { corner: vec![best.1], closed: best.2 }),
    })
}

/// Exact star discrepancy by enumerating every corner on the grid of point
/// coordinates (plus 1) and evaluating both open and closed counts there.
pub fn star_discrepancy_exact(points: &PointSet) -> Result<DiscrepancyReport, UniformityError> {
    let (n, d) = (points.len(), points.dim());
    if n > EXACT_MAX_POINTS || d > EXACT_MAX_DIM {
        return Err(UniformityError::TooLarge { n, d });
    }
    if d == 1 {
        return star_discrepancy_1d(points.as_slice());
    }
    let grids: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let mut g = points.column(i);
            g.push(1.0);
            g.sort_by(f64::total_cmp);
            g.dedup();
            g
        })
        .collect();
    let data = points.as_slice();
    let nf = n as f64;
    let mut best = (f64::NEG_INFINITY, Vec::new(), false);
    let mut idx = vec![0usize; d];
    let mut corner = vec![0.0; d];
    loop {
        for i in 0..d {
            corner[i] = grids[i][idx[i]];
        }
        let vol: f64 = corner.iter().product();
        let (mut open, mut closed) = (0usize, 0usize);
        for p in data.chunks_exact(d) {
            let mut inside_open = true;
            let mut inside_closed = true;
            for (&x, &a) in p.iter().zip(&corner) {
                inside_open &= x < a;
                inside_closed &= x <= a;
            }
            open += usize::from(inside_open);
            closed += usize::from(inside_closed);
        }
        let under = vol - open as f64 / nf;
        let over = closed as f64 / nf - vol;
        if under > best.0 {
            best = (under, corner.clone(), false);
        }
        if over > best.0 {
            best = (over, corner.clone(), true);
        }
        // Odometer over the grid.
        let mut axis = 0;
        loop {
            if axis == d {
                return Ok(DiscrepancyReport {
                    n,
                    d,
                    dstar: best.0,
                    method: DiscrepancyMethod::ExactGrid,
                    witness: Some(Witness { corner: best.1, closed: best.2 }),
                });
            }
            idx[axis] += 1;
            if idx[axis] < grids[axis].len() {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub bins: usize,
}

/// Pearson chi-square of equal-width bin counts (`k` per axis) against the
/// uniform expectation, with `k^d - 1` degrees of freedom.
pub fn uniformity_chi_square(points: &PointSet, k: usize) -> Result<ChiSquareResult, UniformityError> {
    if k == 0 {
        return Err(UniformityError::NoBins);
    }
    let d = points.dim();
    let bins_f = (k as f64).powi(d as i32);
    if bins_f > MAX_BINS as f64 {
        return Err(UniformityError::TooManyBins { bins: bins_f });
    }
    let bins = bins_f as usize;
    if points.len() < 5 * bins {
        log::warn!("chi-square with {} points over {bins} bins has fewer than 5 expected per bin", points.len());
    }
    let mut counts = vec![0u64; bins];
    for p in points.rows() {
        let cell = p.iter().fold(0usize, |acc, &x| acc * k + ((x * k as f64) as usize).min(k - 1));
        counts[cell] += 1;
    }
    let expected = points.len() as f64 / bins as f64;
    let statistic: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dof = bins - 1;
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64).expect("positive degrees of freedom").sf(statistic)
    };
    Ok(ChiSquareResult { statistic, dof, p_value, bins })
}
