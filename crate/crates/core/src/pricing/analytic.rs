//! Payoffs and closed-form prices.

use super::{OptionSpec, PricingError};
use crate::stochastic::{norm_cdf, MarketModel};

const DEGENERATE_VOL: f64 = 1e-12;

/// `((∏ S_i)^{1/d} - K)^+`, evaluated as `K·expm1(mean log(S_i/K))` so that
/// large baskets cannot overflow.
pub fn geo_basket_payoff(terminal: &[f64], strike: f64) -> f64 {
    let mean_log = terminal.iter().map(|s| (s / strike).ln()).sum::<f64>() / terminal.len() as f64;
    (strike * mean_log.exp_m1()).max(0.0)
}

/// `((1/m) Σ S(t_i) - K)^+`.
pub fn asian_payoff(path: &[f64], strike: f64) -> f64 {
    (path.iter().sum::<f64>() / path.len() as f64 - strike).max(0.0)
}

/// Black–Scholes call on an asset paying a continuous yield `xi`. When
/// `σ√T < 1e-12` the forward intrinsic value
/// `max(e^{-ξT} S0 - e^{-rT} K, 0)` is returned.
pub fn black_scholes_call(s0: f64, strike: f64, rate: f64, sigma: f64, maturity: f64, xi: f64) -> Result<f64, PricingError> {
    for (name, v) in [("spot", s0), ("strike", strike), ("volatility", sigma), ("maturity", maturity)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(PricingError::InvalidSpec(format!("{name} must be positive, got {v}")));
        }
    }
    if !(rate.is_finite() && xi.is_finite()) {
        return Err(PricingError::InvalidSpec("rate and yield must be finite".into()));
    }
    let carry = (-xi * maturity).exp() * s0;
    let discounted_strike = (-rate * maturity).exp() * strike;
    let vol_t = sigma * maturity.sqrt();
    if vol_t < DEGENERATE_VOL {
        return Ok((carry - discounted_strike).max(0.0));
    }
    let delta = ((s0 / strike).ln() + (rate - xi + 0.5 * sigma * sigma) * maturity) / vol_t;
    Ok(carry * norm_cdf(delta) - discounted_strike * norm_cdf(delta - vol_t))
}

/// Basket volatility `(1/d)√(ΣΣ ρ_ij σ_i σ_j)` and yield
/// `(1/(2d)) Σ σ_i² - σ²/2` of the geometric mean.
pub fn geo_basket_parameters(model: &MarketModel) -> (f64, f64) {
    let d = model.dim();
    let mut quad = 0.0;
    for i in 0..d {
        for j in 0..d {
            quad += model.correlation.get(i, j) * model.vols[i] * model.vols[j];
        }
    }
    let sigma = quad.sqrt() / d as f64;
    let mean_var = model.vols.iter().map(|v| v * v).sum::<f64>() / (2.0 * d as f64);
    (sigma, mean_var - 0.5 * sigma * sigma)
}

/// Closed-form price of a geometric basket call on equal-spot assets.
pub fn geo_basket_closed_form(model: &MarketModel, spec: &OptionSpec) -> Result<f64, PricingError> {
    let s0 = model.spots[0];
    if model.spots.iter().any(|&s| (s - s0).abs() > 1e-12 * s0) {
        return Err(PricingError::UnequalSpots);
    }
    let (sigma, xi) = geo_basket_parameters(model);
    black_scholes_call(s0, spec.strike, model.rate, sigma, spec.maturity, xi)
}
