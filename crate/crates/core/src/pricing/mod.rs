//! Payoffs, closed-form references and MC/QMC/RQMC price estimators.

mod analytic;
mod estimate;
mod integrate;
mod kernels;

pub use analytic::{asian_payoff, black_scholes_call, geo_basket_closed_form, geo_basket_parameters, geo_basket_payoff};
pub use estimate::{estimate_price, estimate_strip, mc_points, Construction};
pub use integrate::{integrate, Integrand, Moments, PointSource, BLOCK};
pub use kernels::{AsianIntegrand, BasketIntegrand, PayoffIntegrand};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lds::LdsError;
use crate::stochastic::StochasticError;

#[derive(Debug, Error)]
pub enum PricingError {
    #[error("point dimension mismatch: expected {expected}, received {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid option: {0}")]
    InvalidSpec(String),
    #[error("closed form requires equal spot prices")]
    UnequalSpots,
    #[error("{kind} options cannot be priced with the {construction} construction")]
    Construction { kind: OptionKind, construction: Construction },
    #[error("the model needs a monitoring grid for path constructions")]
    MissingGrid,
    #[error("grid maturity {grid} differs from option maturity {option}")]
    MaturityMismatch { grid: f64, option: f64 },
    #[error(transparent)]
    Model(#[from] StochasticError),
    #[error(transparent)]
    Points(#[from] LdsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptionKind {
    VanillaCall,
    GeometricBasketCall,
    ArithmeticAsianCall,
}

impl fmt::Display for OptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OptionKind::VanillaCall => "vanilla-call",
            OptionKind::GeometricBasketCall => "geometric-basket-call",
            OptionKind::ArithmeticAsianCall => "arithmetic-asian-call",
        })
    }
}

impl FromStr for OptionKind {
    type Err = PricingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "vanilla-call" | "vanilla" => Ok(OptionKind::VanillaCall),
            "geometric-basket-call" | "basket" => Ok(OptionKind::GeometricBasketCall),
            "arithmetic-asian-call" | "asian" => Ok(OptionKind::ArithmeticAsianCall),
            other => Err(PricingError::InvalidSpec(format!("unknown option kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionSpec {
    pub kind: OptionKind,
    pub strike: f64,
    pub maturity: f64,
}

impl OptionSpec {
    pub fn new(kind: OptionKind, strike: f64, maturity: f64) -> Result<Self, PricingError> {
        let spec = OptionSpec { kind, strike, maturity };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), PricingError> {
        if !(self.strike.is_finite() && self.strike > 0.0) {
            return Err(PricingError::InvalidSpec(format!("strike must be positive, got {}", self.strike)));
        }
        if !(self.maturity.is_finite() && self.maturity > 0.0) {
            return Err(PricingError::InvalidSpec(format!("maturity must be positive, got {}", self.maturity)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceEstimate {
    pub value: f64,
    pub n: usize,
    /// Sample standard error, reported for randomized inputs only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    pub method: String,
}
