//! Uniform-to-normal transforms, correlation factors and log-normal asset
//! paths (forward and Brownian-bridge constructions).

mod bridge;
mod cholesky;
mod gbm;
mod normal;

pub use bridge::{bb_ordering, brownian_path, PathBuilder, PathConstruction, TimeGrid};
pub use cholesky::{cholesky, lower_mul, Matrix};
pub use gbm::{brownian_batch, gbm_paths, terminal_basket_normals, BatchLayout, BatchValues, MarketModel, PathBatch};
pub use normal::{clamp_count, inv_norm_cdf, inv_norm_cdf_unchecked, norm_cdf, U_MAX, U_MIN};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StochasticError {
    #[error("inverse normal argument {0} is not in [0, 1]")]
    QuantileDomain(f64),
    #[error("matrix is not square")]
    NotSquare,
    #[error("correlation diagonal entry {index} is {value}, expected 1")]
    Diagonal { index: usize, value: f64 },
    #[error("correlation matrix is not symmetric at ({row}, {col})")]
    Asymmetric { row: usize, col: usize },
    #[error("correlation matrix is not positive definite: pivot {index} is {pivot:e}")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("monitoring grid is empty")]
    EmptyGrid,
    #[error("monitoring time {index} ({value}) must be positive and strictly increasing")]
    GridOrder { index: usize, value: f64 },
    #[error("unknown path construction '{0}' (expected forward or bridge)")]
    UnknownConstruction(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("invalid market model: {0}")]
    InvalidModel(String),
}
