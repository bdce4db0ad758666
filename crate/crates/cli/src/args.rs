use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qmc", version, about = "Low-discrepancy sequences, uniformity checks and option-pricing convergence experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a point set and write it as CSV.
    #[command(version)]
    Gen(GenArgs),
    /// Star discrepancy (or a chi-square uniformity test) of a CSV point set.
    #[command(version)]
    Discrepancy(DiscrepancyArgs),
    /// Price the basket or Asian option strip with one method.
    #[command(version)]
    Price(PriceArgs),
    /// Run a convergence experiment and write rmse.csv, rmse.svg and run-meta.json.
    #[command(version)]
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Vdc,
    Halton,
    Hammersley,
    Faure,
    Sobol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScrambleArg {
    None,
    Shift,
    Owen,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub count: usize,
    /// Indices to drop before the first point (family default when omitted).
    #[arg(long)]
    pub skip: Option<u64>,
    #[arg(long, value_enum, default_value = "none")]
    pub scramble: ScrambleArg,
    /// Scrambling seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiscrepancyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Require the exact computation and fail when the set is too large for it.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Product {
    Basket,
    Asian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriceMethod {
    Mc,
    Sobol,
    Faure,
    RqmcSobol,
    Halton,
}

#[derive(Debug, Args)]
pub struct PriceArgs {
    #[arg(value_enum)]
    pub product: Product,
    /// JSON configuration; omitted fields take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: PriceMethod,
    #[arg(long)]
    pub n: usize,
    /// Master seed (the configuration's seed when omitted).
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentKind {
    Basket,
    Asian,
    Dimsweep,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub kind: ExperimentKind,
    /// JSON configuration; omitted fields take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads (overrides the configuration; 0 means all cores).
    #[arg(long)]
    pub workers: Option<usize>,
}
