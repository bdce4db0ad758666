//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function returns a JSON string. The plain Rust functions
//! behind them ([`scatter`], [`basket_convergence`], [`brownian_paths`]) are
//! usable and tested natively.

use qmc_core::bench::{render_svg, run_basket_experiment, BasketExperimentConfig, Method, NGrid, Replications};
use qmc_core::lds::{
    apply_scramble, hammersley_points, Family, PointSet, PointSetMeta, ScrambleSpec, Sequence, SequenceSpec,
};
use qmc_core::stochastic::{inv_norm_cdf_unchecked, PathBuilder, PathConstruction, TimeGrid};
use qmc_core::uniformity::{star_discrepancy_exact, uniformity_chi_square, EXACT_MAX_POINTS};
use serde::Serialize;
use wasm_bindgen::prelude::*;

pub const MAX_SCATTER_POINTS: usize = 1 << 14;
pub const MAX_PATHS: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scatter {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Exact star discrepancy of the plotted projection (small sets only).
    pub dstar: Option<f64>,
    /// Chi-square p-value of the projection on an 8 x 8 grid.
    pub chi_square_p: Option<f64>,
}

fn scramble_spec(name: &str, seed: u64) -> Result<ScrambleSpec, String> {
    match name {
        "none" => Ok(ScrambleSpec::none()),
        "shift" => Ok(ScrambleSpec::shift(seed)),
        "owen" => Ok(ScrambleSpec::owen(seed)),
        other => Err(format!("unknown scramble `{other}`")),
    }
}

/// First `n` points of `family` in dimension `dim`, projected on the
/// coordinates `x` and `y` (zero-based).
pub fn scatter(family: &str, dim: usize, n: usize, scramble: &str, seed: u64, x: usize, y: usize) -> Result<Scatter, String> {
    if n == 0 || n > MAX_SCATTER_POINTS {
        return Err(format!("point count must be in 1..={MAX_SCATTER_POINTS}"));
    }
    if x >= dim || y >= dim {
        return Err(format!("projection axes must be below the dimension {dim}"));
    }
    let spec = scramble_spec(scramble, seed)?;
    let points = match family {
        "hammersley" => apply_scramble(&hammersley_points(n, dim).map_err(|e| e.to_string())?, &spec),
        "random" => Sequence::new(SequenceSpec::new(Family::Random, dim).with_seed(seed), None).and_then(|s| s.points(n)),
        other => {
            let family: Family = other.parse().map_err(|e: qmc_core::lds::LdsError| e.to_string())?;
            Sequence::new(SequenceSpec::new(family, dim).with_scramble(spec), None).and_then(|s| s.points(n))
        }
    }
    .map_err(|e| e.to_string())?;
    let xs = points.column(x);
    let ys = points.column(y);
    let coords: Vec<f64> = xs.iter().zip(&ys).flat_map(|(a, b)| [*a, *b]).collect();
    let projection = PointSet::new(2, coords, PointSetMeta::new(Family::External, vec![None; 2], 0)).map_err(|e| e.to_string())?;
    let dstar = (n <= EXACT_MAX_POINTS).then(|| star_discrepancy_exact(&projection).ok()).flatten().map(|r| r.dstar);
    let chi_square_p = (n >= 320).then(|| uniformity_chi_square(&projection, 8).ok()).flatten().map(|r| r.p_value);
    Ok(Scatter { xs, ys, dstar, chi_square_p })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Convergence {
    pub svg: String,
    pub slopes: Vec<(String, f64)>,
    pub options: usize,
}

/// A reduced basket experiment (two maturities, three volatilities, ten
/// strikes) up to `2^max_log2` points.
pub fn basket_convergence(assets: usize, max_log2: u32, seed: u64) -> Result<Convergence, String> {
    if !(8..=14).contains(&max_log2) {
        return Err("max_log2 must be in 8..=14".into());
    }
    if !(1..=20).contains(&assets) {
        return Err("assets must be in 1..=20".into());
    }
    let pow2: Vec<usize> = (6..=max_log2).map(|k| 1usize << k).collect();
    let pow5: Vec<usize> = (2..=8u32).map(|k| 5usize.pow(k)).filter(|&n| n <= 1 << max_log2).collect();
    let config = BasketExperimentConfig {
        maturities: vec![0.5, 1.0],
        volatilities: vec![0.21, 0.41, 0.61],
        assets,
        methods: vec![Method::Mc, Method::Sobol, Method::Faure, Method::RqmcSobol],
        n_grid: NGrid { mc: pow2.clone(), sobol: pow2.clone(), faure: pow5, rqmc_sobol: pow2, ..NGrid::basket() },
        mc_reference_n: 1 << max_log2,
        replications: Replications { mc: 16, rqmc: 4 },
        master_seed: seed,
        workers: 1,
        ..BasketExperimentConfig::default()
    };
    let options = config.maturities.len() * config.volatilities.len() * config.strikes.len();
    let report = run_basket_experiment(&config).map_err(|e| e.to_string())?;
    let slopes = report.fits.iter().map(|(m, f)| (m.clone(), f.slope)).collect();
    Ok(Convergence { svg: render_svg(&report), slopes, options })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Paths {
    pub times: Vec<f64>,
    /// One Brownian path per point, each including `W(0) = 0`.
    pub paths: Vec<Vec<f64>>,
    /// Sample variance of `W(t_i)` across the paths, next to `t_i`.
    pub variance: Vec<f64>,
}

/// Brownian paths on `m` equal steps over one year from the first `count`
/// Sobol' points (or pseudo-random points with `family = "random"`), built
/// forward or by bisection.
pub fn brownian_paths(construction: &str, family: &str, m: usize, count: usize, seed: u64) -> Result<Paths, String> {
    if !(1..=256).contains(&m) || !(2..=MAX_PATHS).contains(&count) {
        return Err(format!("need 1 <= m <= 256 and 2 <= count <= {MAX_PATHS}"));
    }
    let construction: PathConstruction = construction.parse().map_err(|e| format!("{e}"))?;
    let spec = match family {
        "sobol" => SequenceSpec::new(Family::Sobol, m),
        "random" => SequenceSpec::new(Family::Random, m).with_seed(seed),
        other => return Err(format!("unknown family `{other}`")),
    };
    let points = Sequence::new(spec, None).and_then(|s| s.points(count)).map_err(|e| e.to_string())?;
    let grid = TimeGrid::uniform(m, 1.0).map_err(|e| e.to_string())?;
    let builder = PathBuilder::new(grid.clone(), construction);
    let mut z = vec![0.0; m];
    let mut w = vec![0.0; m];
    let mut paths = Vec::with_capacity(count);
    for p in points.rows() {
        for (zi, &u) in z.iter_mut().zip(p) {
            *zi = inv_norm_cdf_unchecked(u);
        }
        builder.build(&z, &mut w);
        paths.push(std::iter::once(0.0).chain(w.iter().copied()).collect::<Vec<f64>>());
    }
    let c = count as f64;
    let variance = (1..=m)
        .map(|i| {
            let mean = paths.iter().map(|p| p[i]).sum::<f64>() / c;
            paths.iter().map(|p| (p[i] - mean).powi(2)).sum::<f64>() / (c - 1.0)
        })
        .collect();
    let times = std::iter::once(0.0).chain(grid.times().iter().copied()).collect();
    Ok(Paths { times, paths, variance })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let value = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = scatter)]
pub fn scatter_js(family: &str, dim: usize, n: usize, scramble: &str, seed: u32, x: usize, y: usize) -> Result<String, JsError> {
    to_js(scatter(family, dim, n, scramble, u64::from(seed), x, y))
}

#[wasm_bindgen(js_name = basketConvergence)]
pub fn basket_convergence_js(assets: usize, max_log2: u32, seed: u32) -> Result<String, JsError> {
    to_js(basket_convergence(assets, max_log2, u64::from(seed)))
}

#[wasm_bindgen(js_name = brownianPaths)]
pub fn brownian_paths_js(construction: &str, family: &str, m: usize, count: usize, seed: u32) -> Result<String, JsError> {
    to_js(brownian_paths(construction, family, m, count, u64::from(seed)))
}
