use super::digits::{check_base, radical_inverse_unchecked};
use super::primes::first_primes;
use super::{Family, LdsError, PointSet, PointSetMeta};

/// One-dimensional Van der Corput points: point `j` is the radical inverse
/// of `skip + j + 1` in base `b`.
pub fn van_der_corput(n: usize, base: u32, skip: u64) -> Result<PointSet, LdsError> {
    check_base(base)?;
    if n == 0 {
        return Err(LdsError::EmptyCount);
    }
    let coords = (0..n as u64).map(|j| radical_inverse_unchecked(skip + j + 1, base)).collect();
    PointSet::new(1, coords, PointSetMeta::new(Family::VanDerCorput, vec![Some(base)], skip))
}

/// Halton points with the first `d` primes as bases.
pub fn halton_points(n: usize, d: usize, skip: u64) -> Result<PointSet, LdsError> {
    let bases = first_primes(d)?;
    if n == 0 {
        return Err(LdsError::EmptyCount);
    }
    let mut coords = Vec::with_capacity(n * d);
    for j in 0..n as u64 {
        let omega = skip + j + 1;
        coords.extend(bases.iter().map(|&b| radical_inverse_unchecked(omega, b)));
    }
    let meta = PointSetMeta::new(Family::Halton, bases.iter().map(|&b| Some(b)).collect(), skip);
    PointSet::new(d, coords, meta)
}

/// Hammersley set: the first coordinate is the centred ladder `(j + 0.5)/n`,
/// the rest are Halton coordinates `1..d-1` at index `j + 1`.
pub fn hammersley_points(n: usize, d: usize) -> Result<PointSet, LdsError> {
    if d == 1 {
        return Err(LdsError::HammersleyOneDim);
    }
    let bases = first_primes(d - 1)?;
    if n == 0 {
        return Err(LdsError::EmptyCount);
    }
    let mut coords = Vec::with_capacity(n * d);
    for j in 0..n {
        coords.push((j as f64 + 0.5) / n as f64);
        coords.extend(bases.iter().map(|&b| radical_inverse_unchecked(j as u64 + 1, b)));
    }
    let mut point_bases = vec![None];
    point_bases.extend(bases.iter().map(|&b| Some(b)));
    PointSet::new(d, coords, PointSetMeta::new(Family::Hammersley, point_bases, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn van_der_corput_examples() {
        assert_eq!(van_der_corput(4, 2, 0).unwrap().as_slice(), &[0.5, 0.25, 0.75, 0.125]);
        assert_eq!(van_der_corput(1, 2, 2).unwrap().as_slice(), &[0.75]);
        assert_eq!(van_der_corput(1, 3, 0).unwrap().as_slice(), &[1.0 / 3.0]);
        assert!(van_der_corput(0, 2, 0).is_err());
        assert!(van_der_corput(3, 1, 0).is_err());
    }

    #[test]
    fn halton_examples() {
        let p = halton_points(1, 3, 0).unwrap();
        assert_eq!(p.point(0), &[0.5, 1.0 / 3.0, 0.2]);
        assert_eq!(halton_points(2, 1, 0).unwrap().as_slice(), &[0.5, 0.25]);
        let err = halton_points(1, 600, 0).unwrap_err();
        assert!(err.to_string().contains("512"));
    }

    #[test]
    fn halton_figure_construction() {
        // 51 points in d = 3: every coordinate is the per-base radical inverse.
        let p = halton_points(51, 3, 0).unwrap();
        for (j, row) in p.rows().enumerate() {
            for (i, &b) in [2u32, 3, 5].iter().enumerate() {
                let mut v = j as u64 + 1;
                let mut x = 0.0;
                let mut scale = 1.0 / f64::from(b);
                while v > 0 {
                    x += (v % u64::from(b)) as f64 * scale;
                    v /= u64::from(b);
                    scale /= f64::from(b);
                }
                assert!((row[i] - x).abs() < 1e-15);
            }
        }
        // Base 2 stratifies the first 32 points one per 1/32 cell.
        let mut cells: Vec<usize> = p.rows().take(31).map(|r| (r[0] * 32.0) as usize).collect();
        cells.sort_unstable();
        cells.dedup();
        assert_eq!(cells.len(), 31);
    }

    #[test]
    fn hammersley_examples() {
        let p = hammersley_points(2, 2).unwrap();
        assert_eq!(p.as_slice(), &[0.25, 0.5, 0.75, 0.25]);
        assert_eq!(hammersley_points(4, 2).unwrap().column(0), vec![0.125, 0.375, 0.625, 0.875]);
        assert_eq!(hammersley_points(1, 2).unwrap().as_slice(), &[0.5, 0.5]);
        assert!(matches!(hammersley_points(4, 1), Err(LdsError::HammersleyOneDim)));
    }
}
