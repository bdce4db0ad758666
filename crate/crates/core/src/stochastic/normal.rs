//! Standard normal distribution function and quantile.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::atomic::{AtomicU64, Ordering};

use libm::erfc;

use super::StochasticError;

/// Smallest and largest arguments accepted after clamping: `2^-53` and `1 - 2^-53`.
pub const U_MIN: f64 = 1.0 / 9_007_199_254_740_992.0;
pub const U_MAX: f64 = 1.0 - U_MIN;

static CLAMPED: AtomicU64 = AtomicU64::new(0);

/// Number of inputs equal to 0 or 1 that were clamped since process start.
pub fn clamp_count() -> u64 {
    CLAMPED.load(Ordering::Relaxed)
}

pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

const A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];
const P_LOW: f64 = 0.02425;

/// Rational approximation for `p <= 0.5`.
fn acklam_lower(p: f64) -> f64 {
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

fn quantile_lower(p: f64) -> f64 {
    let x = acklam_lower(p);
    let e = norm_cdf(x) - p;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// Quantile for inputs already known to be finite. Values outside `(0,1)`
/// are clamped (and counted) rather than rejected.
pub fn inv_norm_cdf_unchecked(u: f64) -> f64 {
    let u = if u <= 0.0 || u >= 1.0 {
        CLAMPED.fetch_add(1, Ordering::Relaxed);
        u.clamp(U_MIN, U_MAX)
    } else {
        u
    };
    if u > 0.5 {
        -quantile_lower(1.0 - u)
    } else {
        quantile_lower(u)
    }
}

/// Standard normal quantile. Inputs exactly 0 or 1 are clamped to
/// `[U_MIN, U_MAX]` and counted.
pub fn inv_norm_cdf(u: f64) -> Result<f64, StochasticError> {
    if !u.is_finite() || !(0.0..=1.0).contains(&u) {
        return Err(StochasticError::QuantileDomain(u));
    }
    if u == 0.0 || u == 1.0 {
        log::warn!("inverse normal argument {u} clamped");
    }
    Ok(inv_norm_cdf_unchecked(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reference_quantiles() {
        assert_eq!(inv_norm_cdf(0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(inv_norm_cdf(0.975).unwrap(), 1.959963984540054, epsilon = 1e-12);
        assert_abs_diff_eq!(inv_norm_cdf(0.001).unwrap(), -3.090232306167813, epsilon = 1e-12);
        assert_abs_diff_eq!(inv_norm_cdf(1e-10).unwrap(), -6.361340902404056, epsilon = 1e-10);
        assert_abs_diff_eq!(inv_norm_cdf(1e-300).unwrap(), -37.0470962993612, epsilon = 1e-9);
    }

    #[test]
    fn symmetry() {
        for &v in &[1e-12, 1e-5, 0.01, 0.1, 0.3, 0.49] {
            // Pair v with a u for which 1 - u is exactly representable.
            let u = 1.0 - (1.0 - v);
            let a = inv_norm_cdf(u).unwrap();
            let b = inv_norm_cdf(1.0 - u).unwrap();
            assert!((a + b).abs() < 1e-12 * a.abs().max(1.0), "{u}: {a} {b}");
        }
    }

    #[test]
    fn endpoints_clamped_and_counted() {
        let before = clamp_count();
        let lo = inv_norm_cdf(0.0).unwrap();
        let hi = inv_norm_cdf(1.0).unwrap();
        assert!(lo.is_finite() && hi.is_finite());
        assert_abs_diff_eq!(lo, inv_norm_cdf(U_MIN).unwrap());
        assert!(clamp_count() >= before + 2);
    }

    #[test]
    fn rejects_non_finite_and_out_of_range() {
        for u in [f64::NAN, f64::INFINITY, -0.1, 1.5] {
            assert!(inv_norm_cdf(u).is_err());
        }
    }

    #[test]
    fn cdf_values() {
        assert_eq!(norm_cdf(0.0), 0.5);
        assert_abs_diff_eq!(norm_cdf(1.959963984540054), 0.975, epsilon = 1e-15);
        assert_abs_diff_eq!(norm_cdf(-8.0), 6.22096057427174e-16, epsilon = 1e-25);
    }
}
