use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    mc_rmse_curve, with_workers, BasketExperimentConfig, BenchError, Method, RmseReport, RmseRow, RunMeta, Skips,
    VolLayout, XAxis,
};
use crate::pricing::{estimate_strip, geo_basket_closed_form, BasketIntegrand, OptionKind, OptionSpec};
use crate::stochastic::{cholesky, MarketModel, Matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasketOption {
    pub maturity: f64,
    /// Volatility parameter of the option (the basket volatility under
    /// the normalized layout).
    pub sigma: f64,
    pub strike: f64,
    pub truth: f64,
}

/// The option set of a basket experiment in a given dimension, with its
/// closed-form prices and a strip integrand pricing all options at once.
#[derive(Debug, Clone)]
pub struct BasketProblem {
    pub d: usize,
    pub options: Vec<BasketOption>,
    pub integrand: BasketIntegrand,
}

fn layout_model(
    config: &BasketExperimentConfig,
    d: usize,
    layout: VolLayout,
    s: usize,
    maturity: f64,
    rho: &Matrix,
) -> Result<MarketModel, BenchError> {
    let list = &config.volatilities;
    let sigma = list[s];
    let cycle = || (0..d).map(|i| list[(s + i) % list.len()]).collect::<Vec<f64>>();
    let (spot, vols) = match layout {
        VolLayout::Uniform => (config.spot, vec![sigma; d]),
        VolLayout::Cycle => (config.spot, cycle()),
        VolLayout::Normalized => {
            let raw = cycle();
            let quad: f64 = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| rho.get(i, j) * raw[i] * raw[j]).sum();
            let scale = sigma * d as f64 / quad.sqrt();
            let vols: Vec<f64> = raw.iter().map(|v| v * scale).collect();
            let xi = vols.iter().map(|v| v * v).sum::<f64>() / (2.0 * d as f64) - 0.5 * sigma * sigma;
            (config.spot * (xi * maturity).exp(), vols)
        }
    };
    Ok(MarketModel::basket(spot, config.rate, vols, rho.clone())?)
}

/// Options in (maturity, volatility, strike) order, all `d`-asset baskets.
pub fn basket_options(config: &BasketExperimentConfig, d: usize, layout: VolLayout) -> Result<BasketProblem, BenchError> {
    let rho = Matrix::equicorrelated(d, config.correlation);
    let l = cholesky(&rho)?;
    let mut integrand = BasketIntegrand::new(d);
    let mut options = Vec::new();
    for &maturity in &config.maturities {
        for (s, &sigma) in config.volatilities.iter().enumerate() {
            let model = layout_model(config, d, layout, s, maturity, &rho)?;
            integrand.add_group(&model, &l, maturity, &config.strikes)?;
            for &strike in &config.strikes {
                let spec = OptionSpec::new(OptionKind::GeometricBasketCall, strike, maturity)?;
                let truth = geo_basket_closed_form(&model, &spec)?;
                options.push(BasketOption { maturity, sigma, strike, truth });
            }
        }
    }
    Ok(BasketProblem { d, options, integrand })
}

impl BasketProblem {
    pub fn truths(&self) -> Vec<f64> {
        self.options.iter().map(|o| o.truth).collect()
    }

    /// Discounted estimates of every option from the first `n` points of
    /// `method` (seeded with `seed` when randomized).
    pub fn estimates(&self, method: Method, n: usize, seed: u64, skips: &Skips) -> Result<Vec<f64>, BenchError> {
        let seq = method.sequence(self.d, seed, skips)?;
        Ok(estimate_strip(&seq, n, &self.integrand, method.is_randomized(), method.name())?
            .into_iter()
            .map(|e| e.value)
            .collect())
    }

    /// Sum of squared errors over all options and `reps` replications.
    fn squared_errors(&self, method: Method, n: usize, reps: usize, master: u64, skips: &Skips) -> Result<f64, BenchError> {
        let reps = if method.is_randomized() { reps } else { 1 };
        let mut total = 0.0;
        for rep in 0..reps {
            let seed = method.task_seed(master, &[rep as u64]);
            let est = self.estimates(method, n, seed, skips)?;
            total += est.iter().zip(&self.options).map(|(e, o)| (e - o.truth).powi(2)).sum::<f64>();
        }
        Ok(total / (reps * self.options.len()) as f64)
    }

    /// RMSE over options (and replications for randomized methods).
    pub fn rmse(&self, method: Method, n: usize, reps: usize, master: u64, skips: &Skips) -> Result<f64, BenchError> {
        Ok(self.squared_errors(method, n, reps, master, skips)?.sqrt())
    }
}

fn meta(experiment: &str, config: &BasketExperimentConfig, methods: &[Method]) -> RunMeta {
    RunMeta {
        experiment: experiment.into(),
        master_seed: config.master_seed,
        seeds: methods.iter().map(|m| (m.name().to_string(), m.task_seed(config.master_seed, &[]))).collect(),
        config_hash: config.hash(),
        timestamp: None,
        workers: config.workers,
        elapsed_seconds: None,
        notes: BTreeMap::new(),
    }
}

/// RMSE against the closed form versus sample count for every configured
/// method. Deterministic methods price all options from one point block;
/// the MC curve is measured at `mc_reference_n` and extrapolated.
pub fn run_basket_experiment(config: &BasketExperimentConfig) -> Result<RmseReport, BenchError> {
    config.validate()?;
    with_workers(config.workers, || {
        let problem = basket_options(config, config.assets, config.vol_layout)?;
        let mut rows = Vec::new();
        let mut meta = meta("basket", config, &config.methods);
        for &method in &config.methods {
            if method == Method::Mc {
                let at_ref = problem.rmse(method, config.mc_reference_n, config.replications.mc, config.master_seed, &config.skips)?;
                meta.notes.insert("mc_rmse_at_reference".into(), serde_json::json!(at_ref));
                for (n, e) in mc_rmse_curve(at_ref, config.mc_reference_n, &config.n_grid.mc) {
                    rows.push(RmseRow { method: method.name().into(), n, d: problem.d, rmse: e });
                }
                continue;
            }
            for &n in config.n_grid.get(method) {
                let e = problem.rmse(method, n, config.replications.rqmc, config.master_seed, &config.skips)?;
                log::info!("basket {method} n={n} rmse={e:.3e}");
                rows.push(RmseRow { method: method.name().into(), n, d: problem.d, rmse: e });
            }
        }
        Ok(RmseReport::new(rows, XAxis::SampleCount, meta))
    })
}

/// RMSE versus dimension at a fixed sample count per method, with the
/// sweep volatility layout.
pub fn run_dimension_sweep(config: &BasketExperimentConfig, d_grid: &[usize]) -> Result<RmseReport, BenchError> {
    config.validate()?;
    if d_grid.is_empty() || d_grid.contains(&0) {
        return Err(BenchError::Config(vec!["dimension grid must be non-empty and positive".into()]));
    }
    with_workers(config.workers, || {
        let mut rows = Vec::new();
        for &d in d_grid {
            let problem = basket_options(config, d, config.sweep_vol_layout)?;
            for &method in &config.sweep_methods {
                let n = config.sweep_n.get(method);
                let reps = if method == Method::Mc { config.replications.mc } else { config.replications.rqmc };
                let e = problem.rmse(method, n, reps, config.master_seed, &config.skips)?;
                log::info!("sweep {method} d={d} n={n} rmse={e:.3e}");
                rows.push(RmseRow { method: method.name().into(), n, d, rmse: e });
            }
        }
        Ok(RmseReport::new(rows, XAxis::Dimension, meta("dimsweep", config, &config.sweep_methods)))
    })
}

/// Per-option comparison of a replicated RQMC estimate with the closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub n: usize,
    pub randomizations: usize,
    pub truths: Vec<f64>,
    pub means: Vec<f64>,
    /// Standard error of each mean across randomizations.
    pub std_errors: Vec<f64>,
}

impl OracleCheck {
    /// `|mean - truth| / se` per option.
    pub fn t_statistics(&self) -> Vec<f64> {
        self.means
            .iter()
            .zip(&self.truths)
            .zip(&self.std_errors)
            .map(|((m, t), s)| if *s > 0.0 { (m - t).abs() / s } else if m == t { 0.0 } else { f64::INFINITY })
            .collect()
    }

    /// Options whose deviation exceeds `k` standard errors.
    pub fn failures(&self, k: f64) -> Vec<usize> {
        self.t_statistics().iter().enumerate().filter(|(_, t)| **t > k).map(|(i, _)| i).collect()
    }
}

/// Scrambled Sobol' estimates of every basket option averaged over
/// `randomizations` independent scramblings of `n` points.
pub fn basket_oracle_check(config: &BasketExperimentConfig, n: usize, randomizations: usize) -> Result<OracleCheck, BenchError> {
    config.validate()?;
    if randomizations < 2 {
        return Err(BenchError::Invalid("at least two randomizations are needed for a standard error".into()));
    }
    with_workers(config.workers, || {
        let problem = basket_options(config, config.assets, config.vol_layout)?;
        let k = problem.options.len();
        let mut runs = Vec::with_capacity(randomizations);
        for rep in 0..randomizations {
            let seed = Method::RqmcSobol.task_seed(config.master_seed, &[rep as u64]);
            runs.push(problem.estimates(Method::RqmcSobol, n, seed, &config.skips)?);
        }
        let r = randomizations as f64;
        let means: Vec<f64> = (0..k).map(|i| runs.iter().map(|run| run[i]).sum::<f64>() / r).collect();
        let std_errors = (0..k)
            .map(|i| {
                let var = runs.iter().map(|run| (run[i] - means[i]).powi(2)).sum::<f64>() / (r - 1.0);
                (var / r).sqrt()
            })
            .collect();
        Ok(OracleCheck { n, randomizations, truths: problem.truths(), means, std_errors })
    })
}
