use std::sync::OnceLock;

use super::LdsError;

/// Number of primes shipped; also the dimension cap for every family.
pub const PRIME_CAP: usize = 512;

/// The first [`PRIME_CAP`] primes, 2 through 3671.
pub fn primes() -> &'static [u32] {
    static TABLE: OnceLock<Vec<u32>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let limit = 3700usize;
        let mut composite = vec![false; limit + 1];
        let mut out = Vec::with_capacity(PRIME_CAP);
        for p in 2..=limit {
            if composite[p] {
                continue;
            }
            out.push(p as u32);
            if out.len() == PRIME_CAP {
                break;
            }
            let mut q = p * p;
            while q <= limit {
                composite[q] = true;
                q += p;
            }
        }
        out
    })
}

/// First `d` primes, the Halton bases for dimension `d`.
pub fn first_primes(d: usize) -> Result<&'static [u32], LdsError> {
    check_dim(d)?;
    Ok(&primes()[..d])
}

pub(crate) fn check_dim(d: usize) -> Result<(), LdsError> {
    if d == 0 {
        Err(LdsError::InvalidDimension(0))
    } else if d > PRIME_CAP {
        Err(LdsError::DimensionCap { requested: d, cap: PRIME_CAP })
    } else {
        Ok(())
    }
}

/// Smallest prime `>= max(d, 2)`: the common Faure base for dimension `d`.
pub fn faure_base(d: usize) -> Result<u32, LdsError> {
    check_dim(d)?;
    let target = d.max(2) as u32;
    Ok(*primes().iter().find(|&&p| p >= target).expect("table extends past the cap"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shape() {
        let p = primes();
        assert_eq!(p.len(), PRIME_CAP);
        assert_eq!(&p[..6], &[2, 3, 5, 7, 11, 13]);
        assert_eq!(p[PRIME_CAP - 1], 3671);
        // Trial division oracle.
        for &q in p {
            assert!((2..q).take_while(|k| k * k <= q).all(|k| q % k != 0));
        }
    }

    #[test]
    fn faure_bases() {
        assert_eq!(faure_base(1).unwrap(), 2);
        assert_eq!(faure_base(5).unwrap(), 5);
        assert_eq!(faure_base(6).unwrap(), 7);
        assert_eq!(faure_base(100).unwrap(), 101);
        assert_eq!(faure_base(512).unwrap(), 521);
    }

    #[test]
    fn cap_is_reported() {
        let err = first_primes(513).unwrap_err();
        assert!(err.to_string().contains("512"), "{err}");
        assert!(faure_base(0).is_err());
    }
}
