use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use qmc_core::bench::{
    run_asian_experiment, run_basket_experiment, run_dimension_sweep, write_report, AsianExperimentConfig,
    BasketExperimentConfig, Method, RmseReport, RunMeta, SlopeFit,
};
use qmc_core::lds::{apply_scramble, hammersley_points, Family, LdsError, PointSet, ScrambleSpec, Sequence, SequenceSpec};
use qmc_core::uniformity::{
    star_discrepancy_1d, star_discrepancy_exact, uniformity_chi_square, EXACT_MAX_DIM, EXACT_MAX_POINTS, MAX_BINS,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

use crate::args::{
    Command, DiscrepancyArgs, ExperimentArgs, ExperimentKind, FamilyArg, GenArgs, PriceArgs, PriceMethod, Product,
    ScrambleArg,
};
use crate::error::CliError;

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Gen(a) => generate(&a),
        Command::Discrepancy(a) => discrepancy(&a),
        Command::Price(a) => price(&a),
        Command::Experiment(a) => experiment(&a),
    }
}

fn lds_at(path: &Path) -> impl Fn(LdsError) -> CliError + '_ {
    move |e| match e {
        LdsError::Io(source) => CliError::io(path, source),
        other => other.into(),
    }
}

fn generate(a: &GenArgs) -> Result<(), CliError> {
    let scramble = match a.scramble {
        ScrambleArg::None => ScrambleSpec::none(),
        ScrambleArg::Shift => ScrambleSpec::shift(a.seed),
        ScrambleArg::Owen => ScrambleSpec::owen(a.seed),
    };
    let points = if a.family == FamilyArg::Hammersley {
        if a.skip.is_some_and(|s| s != 0) {
            return Err(CliError::Validation("Hammersley sets are finite and take no --skip".into()));
        }
        apply_scramble(&hammersley_points(a.count, a.dim)?, &scramble)?
    } else {
        let family = match a.family {
            FamilyArg::Vdc => Family::VanDerCorput,
            FamilyArg::Halton => Family::Halton,
            FamilyArg::Faure => Family::Faure,
            _ => Family::Sobol,
        };
        let mut spec = SequenceSpec::new(family, a.dim).with_scramble(scramble);
        if let Some(skip) = a.skip {
            spec = spec.with_skip(skip);
        }
        Sequence::new(spec, None)?.points(a.count)?
    };
    let file = File::create(&a.out).map_err(|e| CliError::io(&a.out, e))?;
    let mut w = BufWriter::new(file);
    points.write_csv(&mut w).map_err(lds_at(&a.out))?;
    w.flush().map_err(|e| CliError::io(&a.out, e))?;
    println!("wrote {} points of dimension {} to {}", points.len(), points.dim(), a.out.display());
    Ok(())
}

fn chi_square_bins(n: usize, d: usize) -> usize {
    let per_axis = (n as f64 / 5.0).powf(1.0 / d as f64).floor() as usize;
    let cap = (MAX_BINS as f64).powf(1.0 / d as f64).floor() as usize;
    per_axis.clamp(1, cap.max(1))
}

fn discrepancy(a: &DiscrepancyArgs) -> Result<(), CliError> {
    let file = File::open(&a.input).map_err(|e| CliError::io(&a.input, e))?;
    let points = PointSet::read_csv(BufReader::new(file)).map_err(lds_at(&a.input))?;
    let (n, d) = (points.len(), points.dim());
    if d == 1 {
        println!("{}", star_discrepancy_1d(points.as_slice())?);
    } else if a.exact || (n <= EXACT_MAX_POINTS && d <= EXACT_MAX_DIM) {
        println!("{}", star_discrepancy_exact(&points)?);
    } else {
        let k = chi_square_bins(n, d);
        let r = uniformity_chi_square(&points, k)?;
        println!("{:<10} {n}", "points");
        println!("{:<10} {d}", "dimension");
        println!("{:<10} statistical", "method");
        println!("{:<10} {} ({k} per axis)", "bins", r.bins);
        println!("{:<10} {:.6}", "chi2", r.statistic);
        println!("{:<10} {}", "dof", r.dof);
        println!("{:<10} {:.6}", "p-value", r.p_value);
    }
    Ok(())
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else { return Ok(T::default()) };
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn method_of(m: PriceMethod) -> Method {
    match m {
        PriceMethod::Mc => Method::Mc,
        PriceMethod::Sobol => Method::Sobol,
        PriceMethod::Faure => Method::Faure,
        PriceMethod::RqmcSobol => Method::RqmcSobol,
        PriceMethod::Halton => Method::Halton,
    }
}

fn fmt_se(se: Option<f64>) -> String {
    se.map(|s| format!("{s:.10e}")).unwrap_or_default()
}

fn price(a: &PriceArgs) -> Result<(), CliError> {
    let method = method_of(a.method);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let io = |e| CliError::io("<stdout>", e);
    match a.product {
        Product::Basket => {
            let config: BasketExperimentConfig = load_config(a.config.as_deref())?;
            let quotes = qmc_core::bench::price_basket(&config, method, a.n, a.seed.unwrap_or(config.master_seed))?;
            writeln!(out, "maturity,sigma,strike,estimate,std_error,closed_form").map_err(io)?;
            for q in quotes {
                writeln!(
                    out,
                    "{},{},{},{:.10},{},{:.10}",
                    q.maturity,
                    q.sigma,
                    q.strike,
                    q.estimate,
                    fmt_se(q.std_error),
                    q.closed_form
                )
                .map_err(io)?;
            }
        }
        Product::Asian => {
            let config: AsianExperimentConfig = load_config(a.config.as_deref())?;
            let quotes = qmc_core::bench::price_asian(&config, method, a.n, a.seed.unwrap_or(config.master_seed))?;
            writeln!(out, "sigma,strike,estimate,std_error").map_err(io)?;
            for q in quotes {
                writeln!(out, "{},{},{:.10},{}", q.sigma, q.strike, q.estimate, fmt_se(q.std_error)).map_err(io)?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct MetaFile<'a> {
    #[serde(flatten)]
    meta: &'a RunMeta,
    fits: &'a BTreeMap<String, SlopeFit>,
}

fn experiment(a: &ExperimentArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let mut report: RmseReport = match a.kind {
        ExperimentKind::Basket | ExperimentKind::Dimsweep => {
            let mut config: BasketExperimentConfig = load_config(a.config.as_deref())?;
            if let Some(w) = a.workers {
                config.workers = w;
            }
            config.validate()?;
            if a.kind == ExperimentKind::Basket {
                run_basket_experiment(&config)?
            } else {
                run_dimension_sweep(&config, &config.dimensions)?
            }
        }
        ExperimentKind::Asian => {
            let mut config: AsianExperimentConfig = load_config(a.config.as_deref())?;
            if let Some(w) = a.workers {
                config.workers = w;
            }
            config.validate()?;
            run_asian_experiment(&config)?
        }
    };
    report.meta.elapsed_seconds = Some(started.elapsed().as_secs_f64());
    report.meta.timestamp = OffsetDateTime::now_utc().format(&Rfc3339).ok();

    fs::create_dir_all(&a.out).map_err(|e| CliError::io(&a.out, e))?;
    write_report(&report, &a.out.join("rmse.csv"), &a.out.join("rmse.svg"))?;
    let meta_path = a.out.join("run-meta.json");
    let json = serde_json::to_string_pretty(&MetaFile { meta: &report.meta, fits: &report.fits })
        .map_err(|e| CliError::Validation(e.to_string()))?;
    fs::write(&meta_path, json + "\n").map_err(|e| CliError::io(&meta_path, e))?;

    for (method, fit) in &report.fits {
        println!("{method:<12} slope {:+.4}  R^2 {:.4}", fit.slope, fit.r_squared);
    }
    println!("wrote rmse.csv, rmse.svg and run-meta.json to {}", a.out.display());
    Ok(())
}
