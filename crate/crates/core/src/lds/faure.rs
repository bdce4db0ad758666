use super::digits::assemble;
use super::primes::faure_base;
use super::{Family, LdsError, PointSet, PointSetMeta};

/// Number of base-`b` digits needed for any `u64`.
pub(crate) fn u64_digits(base: u32) -> usize {
    let mut v = u64::MAX;
    let mut k = 0;
    while v > 0 {
        v /= u64::from(base);
        k += 1;
    }
    k
}

/// Upper-triangular Pascal matrix `P[r][c] = C(c, r) mod b`, raised to the
/// power `k` by repeated multiplication. Row-major, `size x size`.
pub fn pascal_power(base: u32, k: usize, size: usize) -> Vec<u32> {
    let b = u64::from(base);
    let mut pascal = vec![0u32; size * size];
    for c in 0..size {
        pascal[c] = 1; // C(c, 0)
        for r in 1..=c {
            let up = u64::from(pascal[(r - 1) * size + c - 1]);
            let left = if r < c { u64::from(pascal[r * size + c - 1]) } else { 0 };
            pascal[r * size + c] = ((up + left) % b) as u32;
        }
    }
    let mut acc = vec![0u32; size * size];
    for i in 0..size {
        acc[i * size + i] = 1;
    }
    for _ in 0..k {
        acc = mat_mul_mod(&acc, &pascal, size, b);
    }
    acc
}

fn mat_mul_mod(a: &[u32], b: &[u32], size: usize, modulus: u64) -> Vec<u32> {
    let mut out = vec![0u32; size * size];
    for r in 0..size {
        for c in r..size {
            let mut s = 0u64;
            for k in r..=c {
                s += u64::from(a[r * size + k]) * u64::from(b[k * size + c]);
            }
            out[r * size + c] = (s % modulus) as u32;
        }
    }
    out
}

/// Generator matrix of Faure coordinate `i` (one-based): `P^(i-1) mod b`.
pub fn faure_matrix(i: usize, base: u32, size: usize) -> Vec<u32> {
    pascal_power(base, i - 1, size)
}

/// Digit `y_m(i, omega)` of Faure coordinate `i` evaluated straight from the
/// binomial digit formula (one-based `i` and `m`).
pub fn faure_digit(i: usize, omega: u64, m: usize, base: u32) -> u32 {
    let b = u64::from(base);
    let shift = (i as u64 - 1) % b;
    let mut v = omega;
    let mut kappa = 0usize;
    let mut sum = 0u64;
    while v > 0 {
        let a = v % b;
        v /= b;
        if kappa + 1 >= m {
            let binom = binomial_mod(kappa as u64, (m - 1) as u64, b);
            let power = pow_mod(shift, (kappa + 1 - m) as u64, b);
            sum = (sum + binom * power % b * a) % b;
        }
        kappa += 1;
    }
    sum as u32
}

fn pow_mod(base: u64, exp: u64, m: u64) -> u64 {
    // 0^0 = 1 keeps the diagonal term of coordinate 1.
    let mut r = 1 % m;
    let mut x = base % m;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            r = r * x % m;
        }
        x = x * x % m;
        e >>= 1;
    }
    r
}

fn binomial_mod(n: u64, k: u64, p: u64) -> u64 {
    // Lucas' theorem digit by digit; small factorial products suffice per digit.
    let (mut n, mut k) = (n, k);
    let mut r = 1u64;
    while n > 0 || k > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return 0;
        }
        let mut num = 1u64;
        let mut den = 1u64;
        for j in 0..kd {
            num = num * ((nd - j) % p) % p;
            den = den * ((j + 1) % p) % p;
        }
        r = r * num % p * pow_mod(den, p - 2, p) % p;
        n /= p;
        k /= p;
    }
    r
}

/// Faure generator state: the common base and one generator matrix per
/// coordinate.
#[derive(Debug, Clone)]
pub(crate) struct FaureGenerator {
    pub(crate) base: u32,
    size: usize,
    matrices: Vec<Vec<u32>>,
}

impl FaureGenerator {
    pub(crate) fn new(d: usize) -> Result<Self, LdsError> {
        let base = faure_base(d)?;
        let size = u64_digits(base);
        let b = u64::from(base);
        let pascal = pascal_power(base, 1, size);
        let mut matrices = Vec::with_capacity(d);
        let mut current = pascal_power(base, 0, size);
        for _ in 0..d {
            let next = mat_mul_mod(&current, &pascal, size, b);
            matrices.push(std::mem::replace(&mut current, next));
        }
        Ok(Self { base, size, matrices })
    }

    /// Writes digits `y_1..y_K` of coordinate `coord` (zero-based) for
    /// `omega` into `out`, most significant first; returns `K`.
    pub(crate) fn digits(&self, omega: u64, coord: usize, a: &mut [u32], out: &mut [u32]) -> usize {
        let b = u64::from(self.base);
        let mut v = omega;
        let mut k = 0;
        while v > 0 {
            a[k] = (v % b) as u32;
            v /= b;
            k += 1;
        }
        let m = &self.matrices[coord];
        for r in 0..k {
            let mut s = 0u64;
            for c in r..k {
                s += u64::from(m[r * self.size + c]) * u64::from(a[c]);
            }
            out[r] = (s % b) as u32;
        }
        k
    }

    pub(crate) fn scratch(&self) -> (Vec<u32>, Vec<u32>) {
        (vec![0; self.size], vec![0; self.size])
    }
}

/// Faure points with base `faure_base(d)`; point `j` is `omega = skip + j + 1`.
pub fn faure_points(n: usize, d: usize, skip: u64) -> Result<PointSet, LdsError> {
    if n == 0 {
        return Err(LdsError::EmptyCount);
    }
    let generator = FaureGenerator::new(d)?;
    let (mut a, mut y) = generator.scratch();
    let mut coords = Vec::with_capacity(n * d);
    for j in 0..n as u64 {
        let omega = skip + j + 1;
        for i in 0..d {
            let k = generator.digits(omega, i, &mut a, &mut y);
            coords.push(assemble(generator.base, &y[..k]));
        }
    }
    let meta = PointSetMeta::new(Family::Faure, vec![Some(generator.base); d], skip);
    PointSet::new(d, coords, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lds::{radical_inverse, van_der_corput};

    #[test]
    fn first_coordinate_is_radical_inverse() {
        let p = faure_points(40, 3, 7).unwrap();
        for (j, row) in p.rows().enumerate() {
            assert_eq!(row[0], radical_inverse(7 + j as u64 + 1, 3).unwrap());
        }
    }

    #[test]
    fn one_dimension_is_van_der_corput_base_two() {
        let f = faure_points(64, 1, 0).unwrap();
        let v = van_der_corput(64, 2, 0).unwrap();
        assert_eq!(f.as_slice(), v.as_slice());
    }

    #[test]
    fn matrix_route_matches_digit_formula() {
        for d in 1..=5usize {
            let g = FaureGenerator::new(d).unwrap();
            let b = g.base;
            let (mut a, mut y) = g.scratch();
            for omega in 0..=u64::from(b).pow(4) {
                for i in 0..d {
                    let k = g.digits(omega, i, &mut a, &mut y);
                    for m in 1..=k + 2 {
                        let expected = faure_digit(i + 1, omega, m, b);
                        let got = if m <= k { y[m - 1] } else { 0 };
                        assert_eq!(got, expected, "d={d} i={} omega={omega} m={m}", i + 1);
                    }
                }
            }
        }
    }

    #[test]
    fn pascal_powers_compose() {
        let p2 = pascal_power(7, 2, 6);
        let p3 = pascal_power(7, 3, 6);
        assert_eq!(mat_mul_mod(&p2, &p3, 6, 7), pascal_power(7, 5, 6));
        // P^b = I mod b for prime b.
        let size = 5;
        let pb = pascal_power(5, 5, size);
        let id = pascal_power(5, 0, size);
        assert_eq!(pb, id);
    }

    #[test]
    fn lucas_binomials() {
        for n in 0..30u64 {
            for k in 0..=n {
                let exact = (0..k).fold(1u128, |acc, j| acc * u128::from(n - j) / u128::from(j + 1));
                assert_eq!(binomial_mod(n, k, 7), (exact % 7) as u64, "C({n},{k})");
            }
        }
    }

    #[test]
    fn small_two_dimensional_balance() {
        // d = 2 uses b = 2: four points from an aligned block fill each quarter once.
        let p = faure_points(4, 2, 3).unwrap();
        for i in 0..2 {
            let mut cells: Vec<usize> = p.column(i).iter().map(|x| (x * 4.0) as usize).collect();
            cells.sort_unstable();
            assert_eq!(cells, vec![0, 1, 2, 3]);
        }
    }
}
