//! Low-discrepancy point generation.
//!
//! Every family indexes its points by `omega`. The point at `omega = 0` is
//! the origin; sequences start at `omega = skip + 1` unless the origin is
//! requested, in which case they start at `omega = skip`.

mod digits;
mod faure;
mod halton;
mod pointset;
mod primes;
mod scramble;
mod sequence;
mod sobol;

pub use digits::{
    max_exact_digits, radical_inverse, radical_inverse_with_origin, recoverable_digits,
    DigitExpansion,
};
pub use faure::{faure_digit, faure_matrix, faure_points, pascal_power};
pub use halton::{halton_points, hammersley_points, van_der_corput};
pub use pointset::{Family, PointSet, PointSetMeta};
pub use primes::{faure_base, first_primes, primes, PRIME_CAP};
pub use scramble::{apply_scramble, ScrambleMode, ScrambleSpec, Scrambler};
pub use sequence::{Sequence, SequenceSpec};
pub use sobol::{
    build_sobol_matrices, sobol_points, SobolCoordinate, SobolParams, SobolRecord, SobolTable,
    SOBOL_PARAMS_ENV,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LdsError {
    #[error("base must be at least 2, got {0}")]
    InvalidBase(u32),
    #[error("index 0 is the origin and is excluded unless origin inclusion is requested")]
    OriginExcluded,
    #[error("dimension must be at least 1, got {0}")]
    InvalidDimension(usize),
    #[error("dimension {requested} exceeds the supported cap of {cap}")]
    DimensionCap { requested: usize, cap: usize },
    #[error("point count must be at least 1")]
    EmptyCount,
    #[error("Hammersley sets need dimension >= 2; use van_der_corput for d = 1")]
    HammersleyOneDim,
    #[error("Sobol' parameter line {line}: {message}")]
    SobolParse { line: usize, message: String },
    #[error("Sobol' dimension {dim}: initial direction integer m_{index} = {value} must be odd and < 2^{index}")]
    SobolDirection { dim: usize, index: usize, value: u64 },
    #[error("no Sobol' parameters for dimension {0}")]
    MissingSobolDim(usize),
    #[error("bit depth must be in 1..=63, got {0}")]
    InvalidDepth(u32),
    #[error("index {index} does not fit in {depth} digits")]
    IndexOverflow { index: u64, depth: u32 },
    #[error("unknown scramble mode `{0}`")]
    UnknownMode(String),
    #[error("unknown sequence family `{0}`")]
    UnknownFamily(String),
    #[error("coordinate {coordinate} has no digit base and cannot be scrambled")]
    NoDigitBase { coordinate: usize },
    #[error("coordinate {coordinate} carries more digits than the scramble depth {depth}")]
    DigitsExceedDepth { coordinate: usize, depth: u32 },
    #[error("point set shape mismatch: {0}")]
    Shape(String),
    #[error("coordinate {value} at row {row}, column {col} lies outside [0, 1)")]
    OutOfRange { row: usize, col: usize, value: f64 },
    #[error("malformed point CSV at line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
