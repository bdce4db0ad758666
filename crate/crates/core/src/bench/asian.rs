use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{par_map, with_workers, AsianExperimentConfig, BenchError, Method, RmseReport, RmseRow, RunMeta, XAxis};
use crate::mix::{derive_path, label_tag};
use crate::pricing::{estimate_strip, AsianIntegrand};
use crate::stochastic::{PathBuilder, PathConstruction, TimeGrid};

/// Reference prices per (volatility, strike) combination, volatility-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsianReference {
    pub combinations: Vec<(f64, f64)>,
    pub prices: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub paths: usize,
    pub randomizations: usize,
}

fn combinations(config: &AsianExperimentConfig) -> Vec<(f64, f64)> {
    config.volatilities.iter().flat_map(|&s| config.strikes.iter().map(move |&k| (s, k))).collect()
}

fn grid(config: &AsianExperimentConfig) -> Result<TimeGrid, BenchError> {
    Ok(TimeGrid::uniform(config.monitoring_dates, config.maturity)?)
}

/// Scrambled Sobol' with Brownian bridge at `reference_paths` points,
/// averaged over `reference_randomizations` independent scramblings. All
/// combinations share the same paths.
pub fn asian_references(config: &AsianExperimentConfig) -> Result<AsianReference, BenchError> {
    config.validate()?;
    with_workers(config.workers, || {
        let builder = PathBuilder::new(grid(config)?, PathConstruction::Bridge);
        let mut f = AsianIntegrand::new(builder, config.spot, config.rate);
        for &sigma in &config.volatilities {
            f.add_group(sigma, &config.strikes);
        }
        let combos = combinations(config);
        let r = config.reference_randomizations;
        let mut runs = Vec::with_capacity(r);
        for rep in 0..r {
            let seed = derive_path(config.master_seed, &[label_tag("asian-reference"), rep as u64]);
            let seq = Method::RqmcSobol.sequence(config.monitoring_dates, seed, &config.skips)?;
            let est = estimate_strip(&seq, config.reference_paths, &f, true, "reference")?;
            runs.push(est.into_iter().map(|e| e.value).collect::<Vec<f64>>());
        }
        let rf = r as f64;
        let prices: Vec<f64> = (0..combos.len()).map(|i| runs.iter().map(|x| x[i]).sum::<f64>() / rf).collect();
        let std_errors = (0..combos.len())
            .map(|i| {
                if r < 2 {
                    return 0.0;
                }
                let var = runs.iter().map(|x| (x[i] - prices[i]).powi(2)).sum::<f64>() / (rf - 1.0);
                (var / rf).sqrt()
            })
            .collect();
        Ok(AsianReference {
            combinations: combos,
            prices,
            std_errors,
            paths: config.reference_paths,
            randomizations: r,
        })
    })
}

/// RMSE over all combinations and repetitions against precomputed
/// references. Each (combination, repetition) uses its own seed.
pub fn run_asian_with_references(config: &AsianExperimentConfig, reference: &AsianReference) -> Result<RmseReport, BenchError> {
    config.validate()?;
    let combos = combinations(config);
    if reference.combinations != combos {
        return Err(BenchError::Invalid("reference prices were computed for different combinations".into()));
    }
    with_workers(config.workers, || {
        let grid = grid(config)?;
        let m = config.monitoring_dates;
        let mut rows = Vec::new();
        for &method in &config.methods {
            let construction = if method == Method::Mc { config.mc_construction } else { config.qmc_construction };
            let builder = PathBuilder::new(grid.clone(), construction);
            let integrands: Vec<AsianIntegrand> = combos
                .iter()
                .map(|&(sigma, strike)| {
                    let mut f = AsianIntegrand::new(builder.clone(), config.spot, config.rate);
                    f.add_group(sigma, &[strike]);
                    f
                })
                .collect();
            let reps = if method.is_randomized() { config.repetitions } else { 1 };
            let tasks: Vec<(usize, usize)> = (0..combos.len()).flat_map(|c| (0..reps).map(move |r| (c, r))).collect();
            for &n in config.n_grid.get(method) {
                let errors = par_map(&tasks, |&(c, r)| -> Result<f64, BenchError> {
                    let seed = method.task_seed(config.master_seed, &[c as u64, r as u64]);
                    let seq = method.sequence(m, seed, &config.skips)?;
                    let est = estimate_strip(&seq, n, &integrands[c], method.is_randomized(), method.name())?;
                    Ok((est[0].value - reference.prices[c]).powi(2))
                });
                let mut total = 0.0;
                for e in errors {
                    total += e?;
                }
                let e = (total / tasks.len() as f64).sqrt();
                log::info!("asian {method} n={n} rmse={e:.3e}");
                rows.push(RmseRow { method: method.name().into(), n, d: m, rmse: e });
            }
        }
        let mut notes = BTreeMap::new();
        notes.insert("reference".into(), serde_json::to_value(reference).expect("reference serializes"));
        let meta = RunMeta {
            experiment: "asian".into(),
            master_seed: config.master_seed,
            seeds: config.methods.iter().map(|m| (m.name().to_string(), m.task_seed(config.master_seed, &[]))).collect(),
            config_hash: config.hash(),
            timestamp: None,
            workers: config.workers,
            elapsed_seconds: None,
            notes,
        };
        Ok(RmseReport::new(rows, XAxis::SampleCount, meta))
    })
}

/// Reference prices followed by the RMSE curves.
pub fn run_asian_experiment(config: &AsianExperimentConfig) -> Result<RmseReport, BenchError> {
    let reference = asian_references(config)?;
    run_asian_with_references(config, &reference)
}
