use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::integrate::{integrate, PointSource};
use super::kernels::{AsianIntegrand, BasketIntegrand, PayoffIntegrand};
use super::{OptionKind, OptionSpec, PriceEstimate, PricingError};
use crate::lds::{Family, PointSet, PointSetMeta, ScrambleMode};
use crate::rng::UniformStream;
use crate::stochastic::{MarketModel, PathBuilder, PathConstruction};

/// How a point is turned into the payoff's state variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    Terminal,
    ForwardPath,
    BridgePath,
}

impl Construction {
    pub fn path(self) -> Option<PathConstruction> {
        match self {
            Construction::Terminal => None,
            Construction::ForwardPath => Some(PathConstruction::Forward),
            Construction::BridgePath => Some(PathConstruction::Bridge),
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Construction::Terminal => "terminal",
            Construction::ForwardPath => "forward",
            Construction::BridgePath => "bridge",
        })
    }
}

impl FromStr for Construction {
    type Err = PricingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "terminal" => Ok(Construction::Terminal),
            "forward" | "forward-path" => Ok(Construction::ForwardPath),
            "bridge" | "bridge-path" => Ok(Construction::BridgePath),
            other => Err(PricingError::InvalidSpec(format!("unknown construction '{other}'"))),
        }
    }
}

fn method_tag(meta: &PointSetMeta) -> String {
    match meta.scramble {
        ScrambleMode::None => meta.family.to_string(),
        mode => format!("{}+{}", meta.family, mode),
    }
}

/// Discounted prices of every output of `f` over rows `0..n` of `source`.
pub fn estimate_strip<S: PointSource, F: PayoffIntegrand>(
    source: &S,
    n: usize,
    f: &F,
    randomized: bool,
    method: &str,
) -> Result<Vec<PriceEstimate>, PricingError> {
    let moments = integrate(source, n, f)?;
    Ok(f
        .discounts()
        .into_iter()
        .enumerate()
        .map(|(i, disc)| PriceEstimate {
            value: disc * moments.mean(i),
            n,
            std_error: randomized.then(|| disc * moments.std_error(i)),
            method: method.to_string(),
        })
        .collect())
}

/// Prices one option by averaging discounted payoffs over the point set.
pub fn estimate_price(
    points: &PointSet,
    model: &MarketModel,
    spec: &OptionSpec,
    construction: Construction,
) -> Result<PriceEstimate, PricingError> {
    spec.validate()?;
    model.validate()?;
    let randomized = points.meta().is_randomized();
    let tag = method_tag(points.meta());
    let check_dim = |expected: usize| {
        if points.dim() == expected {
            Ok(())
        } else {
            Err(PricingError::Dimension { expected, got: points.dim() })
        }
    };
    let mismatch = || PricingError::Construction { kind: spec.kind, construction };
    let estimates = match (spec.kind, construction.path()) {
        (OptionKind::VanillaCall | OptionKind::GeometricBasketCall, None) => {
            if spec.kind == OptionKind::VanillaCall && model.dim() != 1 {
                return Err(PricingError::InvalidSpec("a vanilla call needs a single-asset model".into()));
            }
            check_dim(model.dim())?;
            let mut f = BasketIntegrand::new(model.dim());
            f.add_group(model, &model.cholesky()?, spec.maturity, &[spec.strike])?;
            estimate_strip(points, points.len(), &f, randomized, &tag)?
        }
        (OptionKind::ArithmeticAsianCall, Some(path)) => {
            if model.dim() != 1 {
                return Err(PricingError::InvalidSpec("an Asian call needs a single-asset model".into()));
            }
            let grid = model.grid.as_ref().ok_or(PricingError::MissingGrid)?;
            if (grid.maturity() - spec.maturity).abs() > 1e-12 * spec.maturity {
                return Err(PricingError::MaturityMismatch { grid: grid.maturity(), option: spec.maturity });
            }
            check_dim(grid.len())?;
            let mut f = AsianIntegrand::new(PathBuilder::new(grid.clone(), path), model.spots[0], model.rate);
            f.add_group(model.vols[0], &[spec.strike]);
            estimate_strip(points, points.len(), &f, randomized, &tag)?
        }
        _ => return Err(mismatch()),
    };
    Ok(estimates.into_iter().next().expect("one output"))
}

/// `n` pseudo-random points in `[0,1)^d`, reproducible from `seed`.
pub fn mc_points(n: usize, d: usize, seed: u64) -> PointSet {
    let mut coords = vec![0.0; n * d];
    UniformStream::new(seed, 0, d).fill(0, &mut coords);
    let mut meta = PointSetMeta::new(Family::Random, vec![None; d], 0);
    meta.seed = Some(seed);
    PointSet::new(d, coords, meta).expect("uniforms lie in (0,1)")
}
