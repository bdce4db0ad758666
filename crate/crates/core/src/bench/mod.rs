//! Convergence experiments: basket and Asian RMSE curves, the dimension
//! sweep, slope fitting and CSV/SVG reports.

mod asian;
mod basket;
mod config;
mod quotes;
mod report;

pub use asian::{asian_references, run_asian_experiment, run_asian_with_references, AsianReference};
pub use basket::{
    basket_options, basket_oracle_check, run_basket_experiment, run_dimension_sweep, BasketOption, BasketProblem,
    OracleCheck,
};
pub use config::{
    config_hash, AsianExperimentConfig, BasketExperimentConfig, NGrid, Replications, Skips, SweepN, VolLayout,
};
pub use quotes::{price_asian, price_basket, AsianQuote, BasketQuote};
pub use report::{read_rmse_csv, render_svg, write_report, write_rmse_csv};

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lds::{Family, LdsError, ScrambleSpec, Sequence, SequenceSpec};
use crate::mix::{derive_path, label_tag};
use crate::pricing::PricingError;
use crate::stochastic::StochasticError;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("{0}")]
    Invalid(String),
    #[error("report has no rows")]
    EmptyReport,
    #[error("slope fit needs at least 3 positive rows, got {0}")]
    TooFewRows(usize),
    #[error("length mismatch: {estimates} estimates for {truths} reference values")]
    Length { estimates: usize, truths: usize },
    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Pricing(#[from] PricingError),
    #[error(transparent)]
    Points(#[from] LdsError),
    #[error(transparent)]
    Model(#[from] StochasticError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Mc,
    Sobol,
    Faure,
    RqmcSobol,
    Halton,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Mc, Method::Sobol, Method::Faure, Method::RqmcSobol, Method::Halton];

    pub fn name(self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::Sobol => "sobol",
            Method::Faure => "faure",
            Method::RqmcSobol => "rqmc-sobol",
            Method::Halton => "halton",
        }
    }

    /// Whether estimates change with the seed.
    pub fn is_randomized(self) -> bool {
        matches!(self, Method::Mc | Method::RqmcSobol)
    }

    /// Seed for one task, derived from the master seed, the method and the
    /// task coordinates (option or combination index, replication index).
    pub fn task_seed(self, master: u64, coordinates: &[u64]) -> u64 {
        let mut tags = vec![label_tag(self.name())];
        tags.extend_from_slice(coordinates);
        derive_path(master, &tags)
    }

    /// Point stream for this method in dimension `d`. Randomized methods use
    /// `seed`; scrambled Sobol' starts at the origin so every power-of-two
    /// prefix is a complete net.
    pub fn sequence(self, d: usize, seed: u64, skips: &Skips) -> Result<Sequence, LdsError> {
        let spec = match self {
            Method::Mc => SequenceSpec::new(Family::Random, d).with_seed(seed),
            Method::Sobol => {
                let s = SequenceSpec::new(Family::Sobol, d).with_origin(true);
                let skip = skips.sobol.unwrap_or(s.skip);
                s.with_skip(skip)
            }
            Method::Faure => {
                let s = SequenceSpec::new(Family::Faure, d).with_origin(true);
                let skip = skips.faure.unwrap_or(s.skip);
                s.with_skip(skip)
            }
            Method::Halton => {
                let s = SequenceSpec::new(Family::Halton, d);
                let skip = skips.halton.unwrap_or(s.skip);
                s.with_skip(skip)
            }
            Method::RqmcSobol => SequenceSpec::new(Family::Sobol, d)
                .with_skip(0)
                .with_origin(true)
                .with_scramble(ScrambleSpec::owen(seed)),
        };
        Sequence::new(spec, None)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| BenchError::Invalid(format!("unknown method '{s}' (expected mc, sobol, faure, rqmc-sobol or halton)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmseRow {
    pub method: String,
    pub n: usize,
    pub d: usize,
    pub rmse: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XAxis {
    SampleCount,
    Dimension,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub experiment: String,
    pub master_seed: u64,
    /// Base seed per method (task seeds are derived from these).
    pub seeds: BTreeMap<String, u64>,
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub workers: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
    /// Extra named values, such as reference prices.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmseReport {
    pub rows: Vec<RmseRow>,
    pub fits: BTreeMap<String, SlopeFit>,
    pub x_axis: XAxis,
    pub meta: RunMeta,
}

impl RmseReport {
    /// Builds a report with rows sorted by (method, n, d) and a slope fit for
    /// every method with at least three distinct sample counts.
    pub fn new(mut rows: Vec<RmseRow>, x_axis: XAxis, meta: RunMeta) -> Self {
        rows.sort_by(|a, b| (&a.method, a.n, a.d).cmp(&(&b.method, b.n, b.d)));
        let mut fits = BTreeMap::new();
        if x_axis == XAxis::SampleCount {
            for method in rows.iter().map(|r| r.method.clone()).collect::<std::collections::BTreeSet<_>>() {
                let pts: Vec<(f64, f64)> =
                    rows.iter().filter(|r| r.method == method).map(|r| (r.n as f64, r.rmse)).collect();
                if let Ok(fit) = fit_slope(&pts) {
                    fits.insert(method, fit);
                }
            }
        }
        RmseReport { rows, fits, x_axis, meta }
    }

    pub fn rows_for<'a>(&'a self, method: &'a str) -> impl Iterator<Item = &'a RmseRow> + 'a {
        self.rows.iter().filter(move |r| r.method == method)
    }

    /// RMSE of `method` at sample count `n` (first matching row).
    pub fn rmse_at(&self, method: &str, n: usize) -> Option<f64> {
        self.rows_for(method).find(|r| r.n == n).map(|r| r.rmse)
    }

    /// Slope fit of `method` restricted to `lo <= n <= hi`.
    pub fn fit_between(&self, method: &str, lo: usize, hi: usize) -> Result<SlopeFit, BenchError> {
        let pts: Vec<(f64, f64)> =
            self.rows_for(method).filter(|r| r.n >= lo && r.n <= hi).map(|r| (r.n as f64, r.rmse)).collect();
        fit_slope(&pts)
    }
}

/// `√((1/m) Σ (estimate_i - truth_i)²)`.
pub fn rmse(estimates: &[f64], truths: &[f64]) -> Result<f64, BenchError> {
    if estimates.len() != truths.len() || estimates.is_empty() {
        return Err(BenchError::Length { estimates: estimates.len(), truths: truths.len() });
    }
    let sq: f64 = estimates.iter().zip(truths).map(|(e, t)| (e - t) * (e - t)).sum();
    Ok((sq / estimates.len() as f64).sqrt())
}

/// Square-root extrapolation `rmse_ref · √(n_ref / n)` over `n_grid`.
pub fn mc_rmse_curve(rmse_at_ref: f64, n_ref: usize, n_grid: &[usize]) -> Vec<(usize, f64)> {
    n_grid.iter().map(|&n| (n, rmse_at_ref * (n_ref as f64 / n as f64).sqrt())).collect()
}

/// Ordinary least squares of `log rmse` on `log n`. Rows with a
/// non-positive coordinate are dropped with a warning.
pub fn fit_slope(rows: &[(f64, f64)]) -> Result<SlopeFit, BenchError> {
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter(|&&(n, e)| {
            let ok = n > 0.0 && e > 0.0 && n.is_finite() && e.is_finite();
            if !ok {
                log::warn!("slope fit drops row (n = {n}, rmse = {e})");
            }
            ok
        })
        .map(|&(n, e)| (n.ln(), e.ln()))
        .collect();
    let k = usable.len();
    if k < 3 {
        return Err(BenchError::TooFewRows(k));
    }
    let kf = k as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / kf;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / kf;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = usable.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(BenchError::Invalid("slope fit needs at least two distinct n".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).min(1.0) };
    Ok(SlopeFit { slope, intercept: my - slope * mx, r_squared, points: k })
}

/// Runs `f` on a pool of `workers` threads (all cores when 0). Results do
/// not depend on the worker count.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(f),
            Err(e) => {
                log::warn!("thread pool unavailable ({e}); running on the current thread");
                f()
            }
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        f()
    }
}

/// Maps `f` over `items`, in parallel when enabled, returning results in
/// item order.
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
