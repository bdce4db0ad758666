use std::path::PathBuf;

use qmc_core::bench::BenchError;
use qmc_core::lds::LdsError;
use qmc_core::pricing::PricingError;
use qmc_core::uniformity::UniformityError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    IoOther(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io { .. } | CliError::IoOther(_) => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<LdsError> for CliError {
    fn from(e: LdsError) -> Self {
        match e {
            LdsError::Io(_) => CliError::IoOther(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Io { path, source } => CliError::Io { path, source },
            BenchError::Points(inner) => inner.into(),
            BenchError::Pricing(inner) => inner.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<PricingError> for CliError {
    fn from(e: PricingError) -> Self {
        match e {
            PricingError::Points(inner) => inner.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<UniformityError> for CliError {
    fn from(e: UniformityError) -> Self {
        CliError::Validation(e.to_string())
    }
}
