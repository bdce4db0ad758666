use std::io::Write;

use serde::{Deserialize, Serialize};

use super::bridge::{PathBuilder, TimeGrid};
use super::cholesky::{cholesky, lower_mul, Matrix};
use super::normal::inv_norm_cdf_unchecked;
use super::StochasticError;
use crate::lds::PointSet;

/// Black–Scholes market: log-normal assets with constant rate, volatilities
/// and correlation, optionally with a monitoring grid for path payoffs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketModel {
    pub spots: Vec<f64>,
    pub rate: f64,
    pub vols: Vec<f64>,
    pub correlation: Matrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<TimeGrid>,
}

impl MarketModel {
    pub fn new(
        spots: Vec<f64>,
        rate: f64,
        vols: Vec<f64>,
        correlation: Matrix,
        grid: Option<TimeGrid>,
    ) -> Result<Self, StochasticError> {
        let model = MarketModel { spots, rate, vols, correlation, grid };
        model.validate()?;
        Ok(model)
    }

    pub fn single_asset(spot: f64, rate: f64, vol: f64, grid: Option<TimeGrid>) -> Result<Self, StochasticError> {
        MarketModel::new(vec![spot], rate, vec![vol], Matrix::identity(1), grid)
    }

    /// Equal-spot basket with the given volatilities and correlation.
    pub fn basket(spot: f64, rate: f64, vols: Vec<f64>, correlation: Matrix) -> Result<Self, StochasticError> {
        MarketModel::new(vec![spot; vols.len()], rate, vols, correlation, None)
    }

    pub fn validate(&self) -> Result<(), StochasticError> {
        let d = self.vols.len();
        if d == 0 {
            return Err(StochasticError::InvalidModel("at least one asset is required".into()));
        }
        if self.spots.len() != d || self.correlation.size() != d {
            return Err(StochasticError::InvalidModel(format!(
                "{} spots, {} volatilities and a {}x{} correlation matrix do not agree",
                self.spots.len(),
                d,
                self.correlation.size(),
                self.correlation.size()
            )));
        }
        if let Some(s) = self.spots.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(StochasticError::InvalidModel(format!("spot {s} must be positive")));
        }
        if let Some(v) = self.vols.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(StochasticError::InvalidModel(format!("volatility {v} must be positive")));
        }
        if !self.rate.is_finite() {
            return Err(StochasticError::InvalidModel("rate must be finite".into()));
        }
        self.correlation.validate_correlation()
    }

    pub fn dim(&self) -> usize {
        self.vols.len()
    }

    pub fn cholesky(&self) -> Result<Matrix, StochasticError> {
        cholesky(&self.correlation)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BatchLayout {
    /// Columns are the monitoring dates of one asset.
    Path(TimeGrid),
    /// Columns are assets observed at a single maturity.
    Terminal { maturity: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchValues {
    Brownian,
    Asset,
}

/// Row-major batch of `n` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBatch {
    layout: BatchLayout,
    kind: BatchValues,
    width: usize,
    values: Vec<f64>,
}

impl PathBatch {
    pub fn new(layout: BatchLayout, kind: BatchValues, width: usize, values: Vec<f64>) -> Result<Self, StochasticError> {
        if let BatchLayout::Path(g) = &layout {
            if g.len() != width {
                return Err(StochasticError::Length { expected: g.len(), got: width });
            }
        }
        if width == 0 || values.len() % width != 0 {
            return Err(StochasticError::Length { expected: width, got: values.len() });
        }
        if kind == BatchValues::Asset && values.iter().any(|v| !(*v > 0.0)) {
            return Err(StochasticError::InvalidModel("asset values must be positive".into()));
        }
        Ok(PathBatch { layout, kind, width, values })
    }

    pub fn layout(&self) -> &BatchLayout {
        &self.layout
    }

    pub fn kind(&self) -> BatchValues {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.width..(i + 1) * self.width]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.width)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// CSV dump with header `t_1..t_m` (paths) or `s_1..s_d` (terminal).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let prefix = match self.layout {
            BatchLayout::Path(_) => "t",
            BatchLayout::Terminal { .. } => "s",
        };
        let header: Vec<String> = (1..=self.width).map(|i| format!("{prefix}_{i}")).collect();
        writeln!(w, "{}", header.join(","))?;
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Brownian paths on the builder's grid from the rows of a point set.
pub fn brownian_batch(points: &PointSet, builder: &PathBuilder) -> Result<PathBatch, StochasticError> {
    let m = builder.len();
    if points.dim() != m {
        return Err(StochasticError::Length { expected: m, got: points.dim() });
    }
    let mut values = vec![0.0; points.len() * m];
    let mut z = vec![0.0; m];
    for (row, out) in points.rows().zip(values.chunks_exact_mut(m)) {
        for (zi, &u) in z.iter_mut().zip(row) {
            *zi = inv_norm_cdf_unchecked(u);
        }
        builder.build(&z, out);
    }
    PathBatch::new(BatchLayout::Path(builder.grid().clone()), BatchValues::Brownian, m, values)
}

/// `S(t) = S(0) exp((r - σ²/2) t + σ W(t))` applied to a batch of Brownian
/// values: one asset along a grid, or every asset at a common maturity.
pub fn gbm_paths(model: &MarketModel, w: &PathBatch) -> Result<PathBatch, StochasticError> {
    if w.kind != BatchValues::Brownian {
        return Err(StochasticError::InvalidModel("expected Brownian values".into()));
    }
    let mut values = Vec::with_capacity(w.values.len());
    match &w.layout {
        BatchLayout::Path(grid) => {
            if model.dim() != 1 {
                return Err(StochasticError::Length { expected: 1, got: model.dim() });
            }
            let (s0, sigma) = (model.spots[0], model.vols[0]);
            let drift = model.rate - 0.5 * sigma * sigma;
            for row in w.rows() {
                values.extend(row.iter().zip(grid.times()).map(|(&wt, &t)| s0 * (drift * t + sigma * wt).exp()));
            }
        }
        BatchLayout::Terminal { maturity } => {
            if model.dim() != w.width {
                return Err(StochasticError::Length { expected: model.dim(), got: w.width });
            }
            for row in w.rows() {
                values.extend(row.iter().enumerate().map(|(i, &wt)| {
                    let sigma = model.vols[i];
                    model.spots[i] * ((model.rate - 0.5 * sigma * sigma) * maturity + sigma * wt).exp()
                }));
            }
        }
    }
    PathBatch::new(w.layout.clone(), BatchValues::Asset, w.width, values)
}

/// Terminal asset values `S_i(T)` for one uniform point: componentwise
/// normal quantiles, correlated by `L`, scaled by `√T`.
pub fn terminal_basket_normals(
    u: &[f64],
    l: &Matrix,
    model: &MarketModel,
    maturity: f64,
) -> Result<Vec<f64>, StochasticError> {
    let d = model.dim();
    if u.len() != d || l.size() != d {
        return Err(StochasticError::Length { expected: d, got: u.len() });
    }
    let z: Vec<f64> = u.iter().map(|&x| inv_norm_cdf_unchecked(x)).collect();
    let mut corr = vec![0.0; d];
    lower_mul(l, &z, &mut corr);
    let sqrt_t = maturity.sqrt();
    Ok((0..d)
        .map(|i| {
            let sigma = model.vols[i];
            model.spots[i] * ((model.rate - 0.5 * sigma * sigma) * maturity + sigma * sqrt_t * corr[i]).exp()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::PathConstruction;

    #[test]
    fn drift_cancels() {
        let sigma = 0.3;
        let grid = TimeGrid::uniform(4, 1.0).unwrap();
        let model = MarketModel::single_asset(100.0, 0.5 * sigma * sigma, sigma, Some(grid.clone())).unwrap();
        let w = PathBatch::new(BatchLayout::Path(grid), BatchValues::Brownian, 4, vec![0.0; 8]).unwrap();
        let s = gbm_paths(&model, &w).unwrap();
        assert!(s.as_slice().iter().all(|&v| (v - 100.0).abs() < 1e-12));
    }

    #[test]
    fn scalar_evaluation() {
        let grid = TimeGrid::new(vec![1.0]).unwrap();
        let model = MarketModel::single_asset(100.0, 0.05, 0.2, Some(grid.clone())).unwrap();
        let w = PathBatch::new(BatchLayout::Path(grid), BatchValues::Brownian, 1, vec![0.0]).unwrap();
        let s = gbm_paths(&model, &w).unwrap();
        assert!((s.as_slice()[0] - 100.0 * 0.03f64.exp()).abs() < 1e-12);
        assert!((s.as_slice()[0] - 103.045_453_395_351_7).abs() < 1e-9);
    }

    #[test]
    fn median_point_gives_drift_only_values() {
        let model = MarketModel::basket(100.0, 0.05, vec![0.2, 0.3, 0.4], Matrix::equicorrelated(3, 0.25)).unwrap();
        let l = model.cholesky().unwrap();
        let s = terminal_basket_normals(&[0.5; 3], &l, &model, 2.0).unwrap();
        for (i, v) in s.iter().enumerate() {
            let sigma = model.vols[i];
            assert!((v - 100.0 * ((0.05 - 0.5 * sigma * sigma) * 2.0).exp()).abs() < 1e-12);
        }
        assert!(terminal_basket_normals(&[0.5; 2], &l, &model, 2.0).is_err());
    }

    #[test]
    fn one_asset_terminal_matches_single_step_path() {
        let grid = TimeGrid::new(vec![0.75]).unwrap();
        let model = MarketModel::single_asset(90.0, 0.03, 0.25, Some(grid.clone())).unwrap();
        let u = 0.8;
        let s = terminal_basket_normals(&[u], &Matrix::identity(1), &model, 0.75).unwrap();
        let pts = PointSet::new(1, vec![u], crate::lds::PointSetMeta::new(crate::lds::Family::External, vec![None], 0)).unwrap();
        let w = brownian_batch(&pts, &PathBuilder::new(grid, PathConstruction::Bridge)).unwrap();
        let path = gbm_paths(&model, &w).unwrap();
        assert!((s[0] - path.as_slice()[0]).abs() < 1e-12);
    }

    #[test]
    fn model_validation() {
        assert!(MarketModel::single_asset(-1.0, 0.05, 0.2, None).is_err());
        assert!(MarketModel::single_asset(100.0, 0.05, 0.0, None).is_err());
        assert!(MarketModel::new(vec![1.0; 2], 0.0, vec![0.2; 3], Matrix::identity(3), None).is_err());
    }

    #[test]
    fn csv_header() {
        let grid = TimeGrid::uniform(3, 1.0).unwrap();
        let w = PathBatch::new(BatchLayout::Path(grid), BatchValues::Brownian, 3, vec![0.0; 3]).unwrap();
        let mut buf = Vec::new();
        w.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("t_1,t_2,t_3\n"));
    }
}
