//! Experiment configuration. Every field has a default, so a config file
//! only lists what it changes.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{BenchError, Method};
use crate::stochastic::PathConstruction;

fn powers(base: usize, lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|k| base.pow(k)).collect()
}

/// Sample counts per method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NGrid {
    pub mc: Vec<usize>,
    pub sobol: Vec<usize>,
    pub faure: Vec<usize>,
    pub rqmc_sobol: Vec<usize>,
    pub halton: Vec<usize>,
}

impl NGrid {
    pub fn basket() -> Self {
        NGrid {
            mc: powers(2, 8, 16),
            sobol: powers(2, 8, 16),
            faure: powers(5, 3, 6),
            rqmc_sobol: powers(2, 8, 16),
            halton: powers(2, 8, 16),
        }
    }

    pub fn asian() -> Self {
        let g = powers(2, 8, 14);
        NGrid { mc: g.clone(), sobol: g.clone(), faure: powers(5, 3, 6), rqmc_sobol: g.clone(), halton: g }
    }

    pub fn get(&self, method: Method) -> &[usize] {
        match method {
            Method::Mc => &self.mc,
            Method::Sobol => &self.sobol,
            Method::Faure => &self.faure,
            Method::RqmcSobol => &self.rqmc_sobol,
            Method::Halton => &self.halton,
        }
    }
}

impl Default for NGrid {
    fn default() -> Self {
        NGrid::basket()
    }
}

/// Sample count per method for the dimension sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepN {
    pub mc: usize,
    pub sobol: usize,
    pub faure: usize,
    pub rqmc_sobol: usize,
    pub halton: usize,
}

impl Default for SweepN {
    fn default() -> Self {
        SweepN { mc: 1 << 12, sobol: 1 << 12, faure: 3125, rqmc_sobol: 1 << 12, halton: 1 << 12 }
    }
}

impl SweepN {
    pub fn get(&self, method: Method) -> usize {
        match method {
            Method::Mc => self.mc,
            Method::Sobol => self.sobol,
            Method::Faure => self.faure,
            Method::RqmcSobol => self.rqmc_sobol,
            Method::Halton => self.halton,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Replications {
    /// Pseudo-random replications per option for the empirical MC error.
    pub mc: usize,
    /// Independent scramblings per sample count for RQMC.
    pub rqmc: usize,
}

impl Default for Replications {
    fn default() -> Self {
        Replications { mc: 100, rqmc: 8 }
    }
}

/// Burn-in per deterministic family; `None` uses the family default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Skips {
    pub sobol: Option<u64>,
    pub faure: Option<u64>,
    pub halton: Option<u64>,
}

/// How asset volatilities are assigned for an option with volatility `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VolLayout {
    /// Every asset has volatility `σ`.
    #[default]
    Uniform,
    /// Asset `i` takes the `(s + i)`-th volatility of the list, cyclically,
    /// where `s` is the position of `σ` in the list.
    Cycle,
    /// The cyclic pattern rescaled so the basket volatility equals `σ`, with
    /// spots lifted by `e^{ξT}` so the geometric mean has the law of a single
    /// asset with volatility `σ`.
    Normalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasketExperimentConfig {
    pub spot: f64,
    pub rate: f64,
    pub maturities: Vec<f64>,
    pub volatilities: Vec<f64>,
    pub strikes: Vec<f64>,
    pub assets: usize,
    /// Pairwise correlation between assets.
    pub correlation: f64,
    pub vol_layout: VolLayout,
    pub methods: Vec<Method>,
    pub n_grid: NGrid,
    /// Sample count at which the MC error is measured before extrapolation.
    pub mc_reference_n: usize,
    pub replications: Replications,
    pub skips: Skips,
    pub dimensions: Vec<usize>,
    pub sweep_n: SweepN,
    pub sweep_vol_layout: VolLayout,
    pub sweep_methods: Vec<Method>,
    pub master_seed: u64,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
}

impl Default for BasketExperimentConfig {
    fn default() -> Self {
        BasketExperimentConfig {
            spot: 100.0,
            rate: 0.05,
            maturities: vec![0.15, 0.25, 0.5, 1.0, 2.0],
            volatilities: (0..10).map(|i| (21 + 5 * i) as f64 / 100.0).collect(),
            strikes: (94..=103).map(f64::from).collect(),
            assets: 5,
            correlation: 0.0,
            vol_layout: VolLayout::Uniform,
            methods: vec![Method::Mc, Method::Sobol, Method::Faure, Method::RqmcSobol],
            n_grid: NGrid::basket(),
            mc_reference_n: 1 << 16,
            replications: Replications::default(),
            skips: Skips::default(),
            dimensions: vec![5, 10, 20, 40, 70, 100],
            sweep_n: SweepN::default(),
            sweep_vol_layout: VolLayout::Cycle,
            sweep_methods: vec![Method::Mc, Method::Sobol, Method::Faure],
            master_seed: 42,
            workers: 0,
        }
    }
}

fn positive(errors: &mut Vec<String>, name: &str, values: &[f64]) {
    if values.is_empty() {
        errors.push(format!("{name} must not be empty"));
    }
    for v in values {
        if !(v.is_finite() && *v > 0.0) {
            errors.push(format!("{name} must be positive, got {v}"));
        }
    }
}

fn grid_ok(errors: &mut Vec<String>, method: Method, grid: &[usize]) {
    if grid.is_empty() {
        errors.push(format!("n_grid for {method} must not be empty"));
    }
    if grid.contains(&0) {
        errors.push(format!("n_grid for {method} contains 0"));
    }
}

fn methods_ok(errors: &mut Vec<String>, name: &str, methods: &[Method]) {
    if methods.is_empty() {
        errors.push(format!("{name} must not be empty"));
    }
    for (i, m) in methods.iter().enumerate() {
        if methods[..i].contains(m) {
            errors.push(format!("{name} lists {m} twice"));
        }
    }
}

impl BasketExperimentConfig {
    /// Checks every field and reports all problems together.
    pub fn validate(&self) -> Result<(), BenchError> {
        let mut errors = Vec::new();
        positive(&mut errors, "spot", &[self.spot]);
        if !self.rate.is_finite() {
            errors.push("rate must be finite".into());
        }
        positive(&mut errors, "maturities", &self.maturities);
        positive(&mut errors, "volatilities", &self.volatilities);
        positive(&mut errors, "strikes", &self.strikes);
        if self.assets == 0 {
            errors.push("assets must be at least 1".into());
        }
        if self.dimensions.contains(&0) {
            errors.push("dimensions must be at least 1".into());
        }
        let max_d = self.dimensions.iter().copied().chain([self.assets]).max().unwrap_or(1).max(2) as f64;
        if !(self.correlation.is_finite() && self.correlation > -1.0 / (max_d - 1.0) && self.correlation < 1.0) {
            errors.push(format!("correlation {} does not give a positive definite matrix", self.correlation));
        }
        methods_ok(&mut errors, "methods", &self.methods);
        methods_ok(&mut errors, "sweep_methods", &self.sweep_methods);
        for &m in &self.methods {
            if m != Method::Mc {
                grid_ok(&mut errors, m, self.n_grid.get(m));
            }
        }
        for &m in &self.sweep_methods {
            if self.sweep_n.get(m) == 0 {
                errors.push(format!("sweep_n for {m} must be positive"));
            }
        }
        if self.methods.contains(&Method::Mc) {
            grid_ok(&mut errors, Method::Mc, &self.n_grid.mc);
            if self.mc_reference_n == 0 {
                errors.push("mc_reference_n must be positive".into());
            }
        }
        if self.replications.mc < 2 || self.replications.rqmc < 2 {
            errors.push("replication counts must be at least 2".into());
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(BenchError::Config(errors))
        }
    }

    pub fn hash(&self) -> String {
        config_hash(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AsianExperimentConfig {
    pub spot: f64,
    pub rate: f64,
    pub maturity: f64,
    /// Number of equispaced monitoring dates `t_i = i·T/m`.
    pub monitoring_dates: usize,
    pub volatilities: Vec<f64>,
    pub strikes: Vec<f64>,
    pub reference_paths: usize,
    pub reference_randomizations: usize,
    /// Independent randomizations (or seeds) per combination and sample count.
    pub repetitions: usize,
    pub methods: Vec<Method>,
    pub n_grid: NGrid,
    pub skips: Skips,
    /// Path construction used by the quasi-random methods.
    pub qmc_construction: PathConstruction,
    /// Path construction used by pseudo-random sampling.
    pub mc_construction: PathConstruction,
    pub master_seed: u64,
    pub workers: usize,
}

impl Default for AsianExperimentConfig {
    fn default() -> Self {
        AsianExperimentConfig {
            spot: 100.0,
            rate: 0.05,
            maturity: 1.0,
            monitoring_dates: 120,
            volatilities: vec![0.15, 0.20, 0.25],
            strikes: vec![90.0, 100.0, 110.0],
            reference_paths: 1 << 20,
            reference_randomizations: 8,
            repetitions: 10,
            methods: vec![Method::Mc, Method::RqmcSobol, Method::Halton],
            n_grid: NGrid::asian(),
            skips: Skips::default(),
            qmc_construction: PathConstruction::Bridge,
            mc_construction: PathConstruction::Forward,
            master_seed: 42,
            workers: 0,
        }
    }
}

impl AsianExperimentConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let mut errors = Vec::new();
        positive(&mut errors, "spot", &[self.spot]);
        positive(&mut errors, "maturity", &[self.maturity]);
        if !self.rate.is_finite() {
            errors.push("rate must be finite".into());
        }
        positive(&mut errors, "volatilities", &self.volatilities);
        positive(&mut errors, "strikes", &self.strikes);
        if self.monitoring_dates == 0 {
            errors.push("monitoring_dates must be at least 1".into());
        }
        if self.reference_paths == 0 || self.reference_randomizations == 0 {
            errors.push("reference_paths and reference_randomizations must be positive".into());
        }
        if self.repetitions == 0 {
            errors.push("repetitions must be positive".into());
        }
        methods_ok(&mut errors, "methods", &self.methods);
        for &m in &self.methods {
            grid_ok(&mut errors, m, self.n_grid.get(m));
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(BenchError::Config(errors))
        }
    }

    /// Number of (volatility, strike) combinations.
    pub fn combinations(&self) -> usize {
        self.volatilities.len() * self.strikes.len()
    }

    pub fn hash(&self) -> String {
        config_hash(self)
    }
}

/// SHA-256 of the canonical JSON form, as lowercase hex.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let json = serde_json::to_vec(config).expect("config serializes");
    Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
}
