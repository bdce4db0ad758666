#![allow(dead_code)]

use qmc_core::lds::PointSet;

/// `erfc` from the Maclaurin series of `erf` below 3 and a backward
/// continued fraction above, independent of any library routine.
pub fn erfc_series(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc_series(-x);
    }
    if x < 3.0 {
        let mut term = x;
        let mut sum = x;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= -x * x / k;
            let add = term / (2.0 * k + 1.0);
            sum += add;
            if add.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        1.0 - 2.0 / std::f64::consts::PI.sqrt() * sum
    } else {
        let mut frac = x;
        for k in (1..=80).rev() {
            frac = x + (k as f64 / 2.0) / frac;
        }
        (-x * x).exp() / std::f64::consts::PI.sqrt() / frac
    }
}

pub fn phi_series(z: f64) -> f64 {
    0.5 * erfc_series(-z / std::f64::consts::SQRT_2)
}

/// Lower bound on the star discrepancy from every dyadic corner `j/g` in
/// each axis (open boxes); the true value exceeds it by at most `d/g`.
pub fn grid_discrepancy_2d(points: &[(f64, f64)], g: usize) -> f64 {
    let n = points.len() as f64;
    let mut best: f64 = 0.0;
    for a in 1..=g {
        let x = a as f64 / g as f64;
        for b in 1..=g {
            let y = b as f64 / g as f64;
            let count = points.iter().filter(|p| p.0 < x && p.1 < y).count() as f64;
            best = best.max((count / n - x * y).abs());
        }
    }
    best
}

/// `D* = max_i max(i/n - x_(i), x_(i) - (i-1)/n)` on the sorted sample.
pub fn closed_form_1d(xs: &[f64]) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(k, &x)| {
            let i = k as f64 + 1.0;
            (i / n - x).max(x - (i - 1.0) / n)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Whether every coordinate of `points` has exactly `n / base^k` points in
/// each interval `[j b^-k, (j+1) b^-k)`.
pub fn balanced(points: &PointSet, base: u32, k: u32) -> bool {
    let cells = (base as usize).pow(k);
    if points.len() % cells != 0 {
        return false;
    }
    let per = points.len() / cells;
    (0..points.dim()).all(|i| {
        let mut counts = vec![0usize; cells];
        for x in points.column(i) {
            counts[((x * cells as f64) as usize).min(cells - 1)] += 1;
        }
        counts.iter().all(|&c| c == per)
    })
}

pub fn sample_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (mean, xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0))
}
