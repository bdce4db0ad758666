use serde::{Deserialize, Serialize};

use super::{basket_options, AsianExperimentConfig, BasketExperimentConfig, BenchError, Method};
use crate::pricing::{estimate_strip, AsianIntegrand, PayoffIntegrand, PointSource};
use crate::stochastic::{PathBuilder, TimeGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasketQuote {
    pub maturity: f64,
    pub sigma: f64,
    pub strike: f64,
    pub estimate: f64,
    pub std_error: Option<f64>,
    pub closed_form: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsianQuote {
    pub sigma: f64,
    pub strike: f64,
    pub estimate: f64,
    pub std_error: Option<f64>,
}

/// Estimates and standard errors of every output. Scrambled Sobol' is
/// averaged over `randomizations` scramblings with the error taken across
/// them; pseudo-random sampling reports the within-sample error.
fn replicated<F, S>(
    f: &F,
    method: Method,
    n: usize,
    seed: u64,
    randomizations: usize,
    source: impl Fn(u64) -> Result<S, BenchError>,
) -> Result<(Vec<f64>, Vec<Option<f64>>), BenchError>
where
    F: PayoffIntegrand,
    S: PointSource,
{
    if method != Method::RqmcSobol {
        let est = estimate_strip(&source(method.task_seed(seed, &[0]))?, n, f, method.is_randomized(), method.name())?;
        return Ok(est.into_iter().map(|e| (e.value, e.std_error)).unzip());
    }
    let r = randomizations.max(2);
    let mut runs = Vec::with_capacity(r);
    for rep in 0..r {
        let est = estimate_strip(&source(method.task_seed(seed, &[rep as u64]))?, n, f, true, method.name())?;
        runs.push(est.into_iter().map(|e| e.value).collect::<Vec<f64>>());
    }
    let rf = r as f64;
    let k = runs[0].len();
    let means: Vec<f64> = (0..k).map(|i| runs.iter().map(|x| x[i]).sum::<f64>() / rf).collect();
    let errors = (0..k)
        .map(|i| Some((runs.iter().map(|x| (x[i] - means[i]).powi(2)).sum::<f64>() / (rf - 1.0) / rf).sqrt()))
        .collect();
    Ok((means, errors))
}

/// Prices every basket option of `config` with `method` at `n` points.
pub fn price_basket(config: &BasketExperimentConfig, method: Method, n: usize, seed: u64) -> Result<Vec<BasketQuote>, BenchError> {
    config.validate()?;
    if n == 0 {
        return Err(BenchError::Invalid("n must be positive".into()));
    }
    let problem = basket_options(config, config.assets, config.vol_layout)?;
    let (est, se) = replicated(&problem.integrand, method, n, seed, config.replications.rqmc, |s| {
        Ok(method.sequence(problem.d, s, &config.skips)?)
    })?;
    Ok(problem
        .options
        .iter()
        .zip(est.into_iter().zip(se))
        .map(|(o, (estimate, std_error))| BasketQuote {
            maturity: o.maturity,
            sigma: o.sigma,
            strike: o.strike,
            estimate,
            std_error,
            closed_form: o.truth,
        })
        .collect())
}

/// Prices every (volatility, strike) Asian combination of `config` with
/// `method` at `n` paths; all combinations share the same paths.
pub fn price_asian(config: &AsianExperimentConfig, method: Method, n: usize, seed: u64) -> Result<Vec<AsianQuote>, BenchError> {
    config.validate()?;
    if n == 0 {
        return Err(BenchError::Invalid("n must be positive".into()));
    }
    let construction = if method == Method::Mc { config.mc_construction } else { config.qmc_construction };
    let grid = TimeGrid::uniform(config.monitoring_dates, config.maturity)?;
    let mut f = AsianIntegrand::new(PathBuilder::new(grid, construction), config.spot, config.rate);
    for &sigma in &config.volatilities {
        f.add_group(sigma, &config.strikes);
    }
    let (est, se) = replicated(&f, method, n, seed, config.repetitions, |s| {
        Ok(method.sequence(config.monitoring_dates, s, &config.skips)?)
    })?;
    let combos = config.volatilities.iter().flat_map(|&s| config.strikes.iter().map(move |&k| (s, k)));
    Ok(combos
        .zip(est.into_iter().zip(se))
        .map(|((sigma, strike), (estimate, std_error))| AsianQuote { sigma, strike, estimate, std_error })
        .collect())
}
