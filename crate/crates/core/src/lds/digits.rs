use super::LdsError;

/// Base-`b` digits of a non-negative integer, least significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitExpansion {
    base: u32,
    digits: Vec<u32>,
}

impl DigitExpansion {
    pub fn new(value: u64, base: u32) -> Result<Self, LdsError> {
        check_base(base)?;
        let mut digits = Vec::new();
        let mut v = value;
        let b = u64::from(base);
        while v > 0 {
            digits.push((v % b) as u32);
            v /= b;
        }
        Ok(Self { base, digits })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Digits `a_0, a_1, ...`; empty for zero.
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Reconstructs the integer `sum a_k b^k`.
    pub fn value(&self) -> u64 {
        self.digits
            .iter()
            .rev()
            .fold(0u128, |acc, &a| acc * u128::from(self.base) + u128::from(a)) as u64
    }

    /// Reflects the digits about the radix point: `sum a_k / b^(k+1)`.
    pub fn reflect(&self) -> f64 {
        assemble(self.base, &self.digits)
    }
}

pub(crate) fn check_base(base: u32) -> Result<(), LdsError> {
    if base < 2 {
        Err(LdsError::InvalidBase(base))
    } else {
        Ok(())
    }
}

/// Radical inverse of `omega >= 1` in base `b`.
///
/// Index zero is the origin and is rejected here; use
/// [`radical_inverse_with_origin`] when the origin is wanted.
pub fn radical_inverse(omega: u64, base: u32) -> Result<f64, LdsError> {
    if omega == 0 {
        return Err(LdsError::OriginExcluded);
    }
    radical_inverse_with_origin(omega, base)
}

/// Radical inverse that maps `omega = 0` to `0.0`.
pub fn radical_inverse_with_origin(omega: u64, base: u32) -> Result<f64, LdsError> {
    check_base(base)?;
    Ok(radical_inverse_unchecked(omega, base))
}

#[inline]
pub(crate) fn radical_inverse_unchecked(omega: u64, base: u32) -> f64 {
    if base == 2 {
        if omega == 0 {
            return 0.0;
        }
        // Reversed bits over the significant width; exact while omega < 2^53.
        let width = 64 - omega.leading_zeros();
        let rev = omega.reverse_bits() >> (64 - width);
        return ratio(u128::from(rev), width, 2);
    }
    let mut buf = [0u32; 64];
    let mut len = 0;
    let mut v = omega;
    let b = u64::from(base);
    while v > 0 {
        buf[len] = (v % b) as u32;
        v /= b;
        len += 1;
    }
    assemble(base, &buf[..len])
}

/// Value of `0.a_0 a_1 a_2 ...` in base `b` where `digits[k]` is the digit
/// of weight `b^-(k+1)`.
///
/// The numerator is accumulated exactly and divided once when `b^K` fits in
/// the double mantissa; otherwise the sum is assembled from the least
/// significant digit upward.
pub(crate) fn assemble(base: u32, digits: &[u32]) -> f64 {
    let b = u128::from(base);
    let mut numerator: u128 = 0;
    let mut denom: u128 = 1;
    for &d in digits {
        denom *= b;
        numerator = numerator * b + u128::from(d);
        if denom > EXACT_LIMIT {
            return horner(base, digits);
        }
    }
    numerator as f64 / denom as f64
}

#[inline]
fn ratio(numerator: u128, width: u32, _base: u32) -> f64 {
    if width <= 53 {
        numerator as f64 * pow2_neg(width)
    } else {
        (numerator >> (width - 53)) as f64 * pow2_neg(53)
    }
}

fn horner(base: u32, digits: &[u32]) -> f64 {
    let b = f64::from(base);
    let v = digits.iter().rev().fold(0.0, |acc, &d| (acc + f64::from(d)) / b);
    if v >= 1.0 {
        ONE_MINUS_ULP
    } else {
        v
    }
}

const EXACT_LIMIT: u128 = 1 << 53;
pub(crate) const ONE_MINUS_ULP: f64 = 1.0 - f64::EPSILON / 2.0;

/// `2^-k` for `k <= 1074`.
#[inline]
pub(crate) fn pow2_neg(k: u32) -> f64 {
    f64::from_bits((1023u64 - u64::from(k)) << 52)
}

/// Largest `D` with `b^D <= 2^53`: the digit count that assembles exactly.
pub fn max_exact_digits(base: u32) -> u32 {
    let b = u128::from(base);
    let mut p: u128 = 1;
    let mut d = 0;
    while p * b <= EXACT_LIMIT {
        p *= b;
        d += 1;
    }
    d
}

/// Largest `D` with `b^D <= 2^47`. Values with at most this many digits can
/// be recovered from their double representation without ambiguity.
pub fn recoverable_digits(base: u32) -> u32 {
    let b = u128::from(base);
    let mut p: u128 = 1;
    let mut d = 0;
    while p * b <= 1 << 47 {
        p *= b;
        d += 1;
    }
    d
}

/// Recovers the first `depth` base-`b` digits of `x` (most significant
/// first). Returns `None` when `x` visibly carries digits beyond `depth`.
/// Requires `depth <= recoverable_digits(base)`.
pub(crate) fn extract_digits(x: f64, base: u32, depth: u32) -> Option<Vec<u32>> {
    debug_assert!(depth <= recoverable_digits(base));
    let scale = u128::from(base).pow(depth);
    let t = x * scale as f64;
    let n = t.round();
    if (t - n).abs() > 1.0 / 16.0 {
        return None;
    }
    let mut n = n as u128;
    let mut digits = vec![0u32; depth as usize];
    for slot in digits.iter_mut().rev() {
        *slot = (n % u128::from(base)) as u32;
        n /= u128::from(base);
    }
    if n != 0 {
        return None;
    }
    Some(digits)
}
