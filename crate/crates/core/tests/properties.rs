//! Invariants checked over generated inputs.

mod common;

use std::io::Cursor;

use proptest::prelude::*;
use qmc_core::bench::{
    asian_references, basket_options, fit_slope, read_rmse_csv, run_asian_with_references, run_basket_experiment,
    write_rmse_csv, AsianExperimentConfig, BasketExperimentConfig, Method, NGrid, RmseRow, Skips, VolLayout,
};
use qmc_core::lds::{
    faure_base, faure_digit, faure_matrix, Family, PointSet, ScrambleSpec, Sequence, SequenceSpec,
};
use qmc_core::pricing::{
    estimate_price, geo_basket_closed_form, mc_points, Construction, OptionKind, OptionSpec,
};
use qmc_core::stochastic::{
    bb_ordering, gbm_paths, inv_norm_cdf, norm_cdf, BatchLayout, BatchValues, MarketModel, Matrix, PathBatch, TimeGrid,
};
use qmc_core::uniformity::{star_discrepancy_1d, star_discrepancy_exact, uniformity_chi_square};

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::Halton), Just(Family::Faure), Just(Family::Sobol)]
}

fn scramble() -> impl Strategy<Value = ScrambleSpec> {
    prop_oneof![
        Just(ScrambleSpec::none()),
        any::<u64>().prop_map(ScrambleSpec::shift),
        any::<u64>().prop_map(ScrambleSpec::owen)
    ]
}

fn external(d: usize, coords: Vec<f64>) -> PointSet {
    PointSet::new(d, coords, qmc_core::lds::PointSetMeta::new(Family::External, vec![None; d], 0)).unwrap()
}

fn aligned(family: Family, d: usize, skip: u64, scramble: ScrambleSpec) -> Sequence {
    let spec = SequenceSpec::new(family, d).with_origin(true).with_skip(skip).with_scramble(scramble);
    Sequence::new(spec, None).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn points_are_reproducible_and_in_range(
        family in family(), d in 1usize..12, n in 1usize..300, skip in 0u64..5000, scramble in scramble(),
    ) {
        let spec = SequenceSpec::new(family, d).with_skip(skip).with_scramble(scramble);
        let a = Sequence::new(spec.clone(), None).unwrap().points(n).unwrap();
        let b = Sequence::new(spec, None).unwrap().points(n).unwrap();
        prop_assert_eq!(a.as_slice(), b.as_slice());
        prop_assert!(a.as_slice().iter().all(|x| (0.0..1.0).contains(x)));
    }

    #[test]
    fn faure_digit_formula_matches_pascal_powers(d in 1usize..=5, omega in 0u64..625) {
        let b = faure_base(d).unwrap();
        let bb = u64::from(b);
        prop_assume!(omega <= bb.pow(4));
        let size = 6;
        let mut digits = vec![0u64; size];
        let mut v = omega;
        for a in digits.iter_mut() {
            *a = v % bb;
            v /= bb;
        }
        for i in 1..=d {
            let m = faure_matrix(i, b, size);
            for r in 0..size {
                let y = (0..size).map(|c| u64::from(m[r * size + c]) * digits[c]).sum::<u64>() % bb;
                prop_assert_eq!(y as u32, faure_digit(i, omega, r + 1, b));
            }
        }
    }

    #[test]
    fn sobol_blocks_are_nets(k in 0u32..=10, j in 0u64..64, seed in any::<u64>(), owen in any::<bool>()) {
        let scramble = if owen { ScrambleSpec::owen(seed) } else { ScrambleSpec::none() };
        let n = 1usize << k;
        let p = aligned(Family::Sobol, 16, j * n as u64, scramble).points(n).unwrap();
        prop_assert!(common::balanced(&p, 2, k));
    }

    #[test]
    fn faure_prefixes_are_nets(d in 1usize..=12, m in 0u32..=3, seed in any::<u64>(), owen in any::<bool>()) {
        let b = faure_base(d).unwrap();
        let scramble = if owen { ScrambleSpec::owen(seed) } else { ScrambleSpec::none() };
        let p = aligned(Family::Faure, d, u64::from(b).pow(4), scramble).points((b as usize).pow(m)).unwrap();
        prop_assert!(common::balanced(&p, b, m));
    }

    #[test]
    fn exact_discrepancy_brackets_grid_search(pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..=16)) {
        let coords: Vec<f64> = pts.iter().flat_map(|p| [p.0, p.1]).collect();
        let exact = star_discrepancy_exact(&external(2, coords.clone())).unwrap().dstar;
        let g = 256;
        let grid = common::grid_discrepancy_2d(&pts, g);
        prop_assert!(grid <= exact + 1e-12);
        prop_assert!(exact <= grid + 2.0 / g as f64 + 1e-12);
        prop_assert!(exact <= 1.0);
    }

    #[test]
    fn one_dimensional_bounds(xs in prop::collection::vec(0.0f64..1.0, 1..80)) {
        let d = star_discrepancy_1d(&xs).unwrap().dstar;
        prop_assert!(d >= 0.5 / xs.len() as f64 - 1e-15);
        prop_assert!(d <= 1.0);
        prop_assert_eq!(d, common::closed_form_1d(&xs));
    }

    #[test]
    fn bridge_order_is_a_permutation(m in 1usize..=10_000) {
        let order = bb_ordering(m);
        prop_assert_eq!(order[0], m);
        let mut seen = vec![false; m + 1];
        for &i in &order {
            prop_assert!((1..=m).contains(&i) && !seen[i]);
            seen[i] = true;
        }
        prop_assert_eq!(order.len(), m);
    }

    #[test]
    fn log_price_is_affine_in_brownian_motion(
        sigma in 0.01f64..1.0, rate in -0.02f64..0.1, w in prop::collection::vec(-4.0f64..4.0, 6),
    ) {
        let grid = TimeGrid::uniform(6, 1.5).unwrap();
        let model = MarketModel::single_asset(80.0, rate, sigma, Some(grid.clone())).unwrap();
        let batch = PathBatch::new(BatchLayout::Path(grid.clone()), BatchValues::Brownian, 6, w.clone()).unwrap();
        let s = gbm_paths(&model, &batch).unwrap();
        for ((si, wi), t) in s.as_slice().iter().zip(&w).zip(grid.times()) {
            let residual = (si / 80.0).ln() - sigma * wi - (rate - 0.5 * sigma * sigma) * t;
            prop_assert!(residual.abs() < 1e-12);
        }
    }

    #[test]
    fn call_estimates_are_nonnegative(
        strike in 50.0f64..200.0, sigma in 0.05f64..0.8, t in 0.1f64..3.0, seed in any::<u64>(),
    ) {
        let model = MarketModel::basket(100.0, 0.05, vec![sigma; 3], Matrix::identity(3)).unwrap();
        let spec = OptionSpec::new(OptionKind::GeometricBasketCall, strike, t).unwrap();
        let est = estimate_price(&mc_points(256, 3, seed), &model, &spec, Construction::Terminal).unwrap();
        prop_assert!(est.value >= 0.0);
    }

    #[test]
    fn estimates_combine_linearly(na in 1usize..6000, nb in 1usize..6000, seed in any::<u64>()) {
        let model = MarketModel::basket(100.0, 0.05, vec![0.2, 0.4], Matrix::equicorrelated(2, 0.2)).unwrap();
        let spec = OptionSpec::new(OptionKind::GeometricBasketCall, 97.0, 1.0).unwrap();
        let a = mc_points(na, 2, seed);
        let b = mc_points(nb, 2, seed ^ 1);
        let ab = a.concat(&b).unwrap();
        let price = |p: &PointSet| estimate_price(p, &model, &spec, Construction::Terminal).unwrap().value;
        let weighted = (na as f64 * price(&a) + nb as f64 * price(&b)) / (na + nb) as f64;
        prop_assert!((price(&ab) - weighted).abs() <= 1e-12 * weighted.abs().max(1.0));
    }

    #[test]
    fn power_laws_are_recovered(c in 0.01f64..100.0, alpha in 0.1f64..2.0, k0 in 0i32..6) {
        let rows: Vec<(f64, f64)> = (k0..k0 + 7).map(|k| { let n = 2f64.powi(k); (n, c * n.powf(-alpha)) }).collect();
        let fit = fit_slope(&rows).unwrap();
        prop_assert!((fit.slope + alpha).abs() < 1e-9);
        prop_assert!((fit.r_squared - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rmse_csv_round_trips(rows in prop::collection::vec(
        ("[a-z][a-z-]{0,10}", 1usize..1_000_000, 1usize..200, 0.0f64..1e3), 0..20)
    ) {
        let rows: Vec<RmseRow> = rows.into_iter().map(|(method, n, d, rmse)| RmseRow { method, n, d, rmse }).collect();
        let mut buf = Vec::new();
        write_rmse_csv(&rows, &mut buf).unwrap();
        let back = read_rmse_csv(Cursor::new(buf)).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (x, y) in back.iter().zip(&rows) {
            prop_assert_eq!(&x.method, &y.method);
            prop_assert_eq!((x.n, x.d), (y.n, y.d));
            prop_assert_eq!(x.rmse.to_bits(), y.rmse.to_bits());
        }
    }
}

#[test]
fn first_scrambled_point_is_uniform() {
    let firsts: Vec<f64> = (0..256u64)
        .map(|seed| aligned(Family::Sobol, 1, 0, ScrambleSpec::owen(seed)).points(1).unwrap().as_slice()[0])
        .collect();
    assert!(uniformity_chi_square(&external(1, firsts), 16).unwrap().p_value > 0.001);
}

#[test]
fn quantile_round_trip_on_log_grid() {
    let mut worst: f64 = 0.0;
    for k in 0..=2200 {
        let v = 10f64.powf(-12.0 + k as f64 * 12.0 / 2200.0);
        for u in [v, 1.0 - v] {
            let x = inv_norm_cdf(u).unwrap();
            worst = worst.max((common::phi_series(x) - u).abs());
        }
    }
    assert!(worst <= 1e-8, "{worst:e}");
    for z in [-7.5, -3.0, -0.4, 0.0, 1.1, 4.0] {
        assert!((norm_cdf(z) - common::phi_series(z)).abs() < 1e-14 * norm_cdf(z).max(1e-300) + 1e-16);
    }
}

#[test]
fn basket_closed_form_is_bracketed_by_monte_carlo() {
    let mut rng = qmc_core::mix::SplitMix64::new(2024);
    let mut unit = move || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    let mut inside = 0;
    for case in 0..50u64 {
        let d = 1 + (unit() * 5.0) as usize;
        let vols: Vec<f64> = (0..d).map(|_| 0.1 + 0.5 * unit()).collect();
        let rho = if d > 1 { -0.9 / (d as f64 - 1.0) + unit() * (0.9 + 0.9 / (d as f64 - 1.0)) } else { 0.0 };
        let strike = 80.0 + 40.0 * unit();
        let t = 0.1 + 1.9 * unit();
        let model = MarketModel::basket(100.0, 0.05, vols, Matrix::equicorrelated(d, rho)).unwrap();
        let spec = OptionSpec::new(OptionKind::GeometricBasketCall, strike, t).unwrap();
        let truth = geo_basket_closed_form(&model, &spec).unwrap();
        let est = estimate_price(&mc_points(1 << 16, d, case), &model, &spec, Construction::Terminal).unwrap();
        if (est.value - truth).abs() <= 3.5 * est.std_error.unwrap() {
            inside += 1;
        }
    }
    assert!(inside >= 48, "{inside} of 50");
}

#[test]
fn basket_price_monotone_in_strike_and_variance() {
    let price = |s: f64, rho: f64, k: f64, t: f64| {
        let model = MarketModel::basket(100.0, 0.05, vec![s; 4], Matrix::equicorrelated(4, rho)).unwrap();
        geo_basket_closed_form(&model, &OptionSpec::new(OptionKind::GeometricBasketCall, k, t).unwrap()).unwrap()
    };
    for s in [0.1, 0.3, 0.6] {
        let strip: Vec<f64> = (60..=140).map(|k| price(s, 0.3, k as f64, 1.0)).collect();
        assert!(strip.windows(2).all(|w| w[1] <= w[0]));
    }
    for t in [0.25, 1.0, 2.0] {
        let strip: Vec<f64> = (1..=40).map(|i| price(0.02 * i as f64, 1.0, 100.0, t)).collect();
        assert!(strip.windows(2).all(|w| w[1] >= w[0]));
    }
    let strip: Vec<f64> = (1..=40).map(|i| price(0.4, 1.0, 100.0, 0.05 * i as f64)).collect();
    assert!(strip.windows(2).all(|w| w[1] >= w[0]));

    // Below perfect correlation the basket yield grows with the asset
    // volatility, so the price eventually falls as volatility rises.
    assert!(price(0.8, 0.3, 100.0, 2.0) < price(0.74, 0.3, 100.0, 2.0));
}

#[test]
fn report_rmse_matches_direct_formula() {
    let config = BasketExperimentConfig {
        methods: vec![Method::Sobol, Method::Faure],
        n_grid: NGrid { sobol: vec![512, 2048], faure: vec![625], ..NGrid::basket() },
        ..BasketExperimentConfig::default()
    };
    let report = run_basket_experiment(&config).unwrap();
    let problem = basket_options(&config, 5, VolLayout::Uniform).unwrap();
    for (method, n) in [(Method::Sobol, 512), (Method::Sobol, 2048), (Method::Faure, 625)] {
        let est = problem.estimates(method, n, 0, &Skips::default()).unwrap();
        let mut sq = 0.0;
        for (e, o) in est.iter().zip(&problem.options) {
            sq += (e - o.truth) * (e - o.truth);
        }
        let direct = (sq / est.len() as f64).sqrt();
        let reported = report.rmse_at(method.name(), n).unwrap();
        assert!((reported - direct).abs() <= 1e-15 * direct, "{method} {n}: {reported} vs {direct}");
    }
}

#[test]
fn asian_slope_is_stable_across_seeds() {
    let base = AsianExperimentConfig {
        reference_paths: 1 << 16,
        methods: vec![Method::RqmcSobol],
        n_grid: NGrid { rqmc_sobol: (8..=12).map(|k| 1 << k).collect(), ..NGrid::asian() },
        ..AsianExperimentConfig::default()
    };
    let reference = asian_references(&base).unwrap();
    let slopes: Vec<f64> = [1u64, 2, 3, 4, 5]
        .iter()
        .map(|&seed| {
            let config = AsianExperimentConfig { master_seed: seed, ..base.clone() };
            run_asian_with_references(&config, &reference).unwrap().fits["rqmc-sobol"].slope
        })
        .collect();
    let mean = slopes.iter().sum::<f64>() / 5.0;
    assert!(slopes.iter().all(|s| (s - mean).abs() <= 0.15), "{slopes:?}");
}
