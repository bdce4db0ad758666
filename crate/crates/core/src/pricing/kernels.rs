//! Payoff integrands evaluating many options from one point.

use super::integrate::Integrand;
use super::PricingError;
use crate::stochastic::{inv_norm_cdf_unchecked, MarketModel, Matrix, PathBuilder};

/// Integrand whose outputs are undiscounted payoffs with known discount factors.
pub trait PayoffIntegrand: Integrand {
    fn discounts(&self) -> Vec<f64>;
}

#[derive(Debug, Clone)]
struct BasketGroup {
    log_forward: f64,
    loadings: Vec<f64>,
    strikes: Vec<f64>,
    discount: f64,
}

/// Geometric basket calls from terminal values. The log of the geometric
/// mean is affine in the standard normals, so each group of options sharing
/// a model and maturity costs one dot product per point plus one payoff per
/// strike.
#[derive(Debug, Clone)]
pub struct BasketIntegrand {
    dim: usize,
    outputs: usize,
    groups: Vec<BasketGroup>,
}

impl BasketIntegrand {
    pub fn new(dim: usize) -> Self {
        BasketIntegrand { dim, outputs: 0, groups: Vec::new() }
    }

    /// Adds calls with the given strikes on the basket of `model` at `maturity`.
    /// Outputs are appended in strike order.
    pub fn add_group(&mut self, model: &MarketModel, l: &Matrix, maturity: f64, strikes: &[f64]) -> Result<(), PricingError> {
        let d = model.dim();
        if d != self.dim || l.size() != d {
            return Err(PricingError::Dimension { expected: self.dim, got: d });
        }
        let scale = maturity.sqrt() / d as f64;
        let loadings = (0..d).map(|j| scale * (j..d).map(|i| model.vols[i] * l.get(i, j)).sum::<f64>()).collect();
        let log_forward = (0..d)
            .map(|i| model.spots[i].ln() + (model.rate - 0.5 * model.vols[i] * model.vols[i]) * maturity)
            .sum::<f64>()
            / d as f64;
        self.outputs += strikes.len();
        self.groups.push(BasketGroup {
            log_forward,
            loadings,
            strikes: strikes.to_vec(),
            discount: (-model.rate * maturity).exp(),
        });
        Ok(())
    }
}

impl Integrand for BasketIntegrand {
    type Scratch = Vec<f64>;

    fn dim(&self) -> usize {
        self.dim
    }

    fn outputs(&self) -> usize {
        self.outputs
    }

    fn scratch(&self) -> Vec<f64> {
        vec![0.0; self.dim]
    }

    fn eval(&self, u: &[f64], z: &mut Vec<f64>, out: &mut [f64]) {
        for (zi, &ui) in z.iter_mut().zip(u) {
            *zi = inv_norm_cdf_unchecked(ui);
        }
        let mut k = 0;
        for g in &self.groups {
            let x = g.log_forward + g.loadings.iter().zip(z.iter()).map(|(c, z)| c * z).sum::<f64>();
            let mean = x.exp();
            for &strike in &g.strikes {
                out[k] = (mean - strike).max(0.0);
                k += 1;
            }
        }
    }
}

impl PayoffIntegrand for BasketIntegrand {
    fn discounts(&self) -> Vec<f64> {
        self.groups.iter().flat_map(|g| std::iter::repeat_n(g.discount, g.strikes.len())).collect()
    }
}

#[derive(Debug, Clone)]
struct AsianGroup {
    sigma: f64,
    drift: Vec<f64>,
    strikes: Vec<f64>,
}

/// Arithmetic Asian calls on one asset; groups share the Brownian path and
/// differ in volatility.
#[derive(Debug, Clone)]
pub struct AsianIntegrand {
    builder: PathBuilder,
    spot: f64,
    rate: f64,
    outputs: usize,
    groups: Vec<AsianGroup>,
}

impl AsianIntegrand {
    pub fn new(builder: PathBuilder, spot: f64, rate: f64) -> Self {
        AsianIntegrand { builder, spot, rate, outputs: 0, groups: Vec::new() }
    }

    pub fn add_group(&mut self, sigma: f64, strikes: &[f64]) {
        let drift = self.builder.grid().times().iter().map(|t| (self.rate - 0.5 * sigma * sigma) * t).collect();
        self.outputs += strikes.len();
        self.groups.push(AsianGroup { sigma, drift, strikes: strikes.to_vec() });
    }
}

impl Integrand for AsianIntegrand {
    type Scratch = (Vec<f64>, Vec<f64>);

    fn dim(&self) -> usize {
        self.builder.len()
    }

    fn outputs(&self) -> usize {
        self.outputs
    }

    fn scratch(&self) -> Self::Scratch {
        (vec![0.0; self.dim()], vec![0.0; self.dim()])
    }

    fn eval(&self, u: &[f64], (z, w): &mut Self::Scratch, out: &mut [f64]) {
        for (zi, &ui) in z.iter_mut().zip(u) {
            *zi = inv_norm_cdf_unchecked(ui);
        }
        self.builder.build(z, w);
        let m = w.len() as f64;
        let mut k = 0;
        for g in &self.groups {
            let total: f64 = g.drift.iter().zip(w.iter()).map(|(a, wt)| (a + g.sigma * wt).exp()).sum();
            let average = self.spot * total / m;
            for &strike in &g.strikes {
                out[k] = (average - strike).max(0.0);
                k += 1;
            }
        }
    }
}

impl PayoffIntegrand for AsianIntegrand {
    fn discounts(&self) -> Vec<f64> {
        vec![(-self.rate * self.builder.grid().maturity()).exp(); self.outputs]
    }
}
