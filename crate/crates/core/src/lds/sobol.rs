use std::path::Path;
use std::sync::OnceLock;

use super::{Family, LdsError, PointSet, PointSetMeta};

/// Environment variable that overrides the shipped direction-number file.
pub const SOBOL_PARAMS_ENV: &str = "QMC_SOBOL_PARAMS";

const BUILTIN_PARAMS: &str = include_str!("../../data/sobol_params.txt");

/// One line of the parameter file: `dim q a m_1 ... m_q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SobolRecord {
    pub dim: usize,
    pub degree: u32,
    /// `alpha_1 .. alpha_{q-1}` packed with `alpha_1` most significant.
    pub coeffs: u64,
    pub initial: Vec<u64>,
}

/// Parsed direction-number records, indexed by dimension.
#[derive(Debug, Clone, Default)]
pub struct SobolTable {
    records: Vec<SobolRecord>,
}

impl SobolTable {
    /// Parses `dim q a m_1 ... m_q` records; blank lines, `#` comments and
    /// a leading `d s a m_i` header are skipped.
    pub fn parse(text: &str) -> Result<Self, LdsError> {
        let mut records: Vec<SobolRecord> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if records.is_empty() && line.split_whitespace().next() == Some("d") {
                continue;
            }
            let err = |message: String| LdsError::SobolParse { line: k + 1, message };
            let fields = line
                .split_whitespace()
                .map(|f| f.parse::<u64>().map_err(|_| err(format!("`{f}` is not an integer"))))
                .collect::<Result<Vec<_>, _>>()?;
            if fields.len() < 4 {
                return Err(err("expected `dim q a m_1 ... m_q`".into()));
            }
            let (dim, degree, coeffs) = (fields[0] as usize, fields[1] as u32, fields[2]);
            if dim < 2 {
                return Err(err(format!("dimension {dim} < 2; dimension 1 is fixed")));
            }
            if degree == 0 || degree > 63 {
                return Err(err(format!("degree {degree} outside 1..=63")));
            }
            if fields.len() != 3 + degree as usize {
                return Err(err(format!("degree {degree} needs {degree} initial values, found {}", fields.len() - 3)));
            }
            if coeffs >> (degree - 1) != 0 {
                return Err(err(format!("coefficient word {coeffs} has more than {} bits", degree - 1)));
            }
            if records.iter().any(|r| r.dim == dim) {
                return Err(err(format!("dimension {dim} listed twice")));
            }
            records.push(SobolRecord { dim, degree, coeffs, initial: fields[3..].to_vec() });
        }
        records.sort_by_key(|r| r.dim);
        Ok(Self { records })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, LdsError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The shipped table (dimensions 2..=512).
    pub fn builtin() -> &'static SobolTable {
        static TABLE: OnceLock<SobolTable> = OnceLock::new();
        TABLE.get_or_init(|| SobolTable::parse(BUILTIN_PARAMS).expect("shipped table parses"))
    }

    /// The file named by `QMC_SOBOL_PARAMS` if set, else the shipped table.
    pub fn from_env() -> Result<SobolTable, LdsError> {
        match std::env::var_os(SOBOL_PARAMS_ENV) {
            Some(path) => Self::from_path(path),
            None => Ok(Self::builtin().clone()),
        }
    }

    /// Table used when none is given explicitly: the file named by
    /// `QMC_SOBOL_PARAMS` (read once per process) or the shipped table.
    pub fn active() -> Result<&'static SobolTable, LdsError> {
        static OVERRIDE: OnceLock<SobolTable> = OnceLock::new();
        match std::env::var_os(SOBOL_PARAMS_ENV) {
            None => Ok(Self::builtin()),
            Some(path) => match OVERRIDE.get() {
                Some(t) => Ok(t),
                None => {
                    let table = Self::from_path(path)?;
                    Ok(OVERRIDE.get_or_init(|| table))
                }
            },
        }
    }

    pub fn record(&self, dim: usize) -> Option<&SobolRecord> {
        self.records.binary_search_by_key(&dim, |r| r.dim).ok().map(|i| &self.records[i])
    }

    /// Largest `d` such that every dimension `2..=d` is present.
    pub fn max_dim(&self) -> usize {
        let mut d = 1;
        while self.record(d + 1).is_some() {
            d += 1;
        }
        d
    }
}

/// Direction data of one coordinate at a given bit depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SobolCoordinate {
    pub degree: u32,
    pub coeffs: u64,
    /// `mu_1 .. mu_m`, each odd with `mu_j < 2^j`.
    pub directions: Vec<u64>,
    /// Column `j` of the generator matrix as an `m`-bit integer,
    /// `V_j = mu_j << (m - j)`; the first digit is the top bit.
    pub columns: Vec<u64>,
    /// `columns[0] ^ ... ^ columns[t]`, the change from `omega - 1` to
    /// `omega` when `omega` has `t` trailing zeros.
    pub(crate) carries: Vec<u64>,
}

impl SobolCoordinate {
    fn from_directions(degree: u32, coeffs: u64, directions: Vec<u64>, depth: u32) -> Self {
        let columns: Vec<u64> =
            directions.iter().enumerate().map(|(j, &mu)| mu << (depth as usize - j - 1)).collect();
        let carries = columns
            .iter()
            .scan(0u64, |acc, &c| {
                *acc ^= c;
                Some(*acc)
            })
            .collect();
        Self { degree, coeffs, directions, columns, carries }
    }

    /// Generator matrix as bits, `g[r][c]` for row `r` (digit `r + 1` of the
    /// output) and column `c` (digit `c` of the index).
    pub fn generator_matrix(&self) -> Vec<Vec<u8>> {
        let m = self.columns.len();
        (0..m)
            .map(|r| self.columns.iter().map(|&v| ((v >> (m - 1 - r)) & 1) as u8).collect())
            .collect()
    }
}

/// Generator matrices for coordinates `1..=d` at bit depth `m`.
#[derive(Debug, Clone)]
pub struct SobolParams {
    depth: u32,
    coords: Vec<SobolCoordinate>,
}

/// Builds the per-coordinate generator matrices. Coordinate 1 is the
/// identity; coordinate `i >= 2` extends its initial `mu_j` with the
/// xor recurrence of its primitive polynomial.
pub fn build_sobol_matrices(table: &SobolTable, d: usize, depth: u32) -> Result<SobolParams, LdsError> {
    if d == 0 {
        return Err(LdsError::InvalidDimension(0));
    }
    if depth == 0 || depth > 63 {
        return Err(LdsError::InvalidDepth(depth));
    }
    let m = depth as usize;
    let mut coords = Vec::with_capacity(d);
    coords.push(SobolCoordinate::from_directions(0, 0, vec![1; m], depth));
    for dim in 2..=d {
        let rec = table.record(dim).ok_or(LdsError::MissingSobolDim(dim))?;
        let q = rec.degree as usize;
        for (j, &mu) in rec.initial.iter().enumerate() {
            let index = j + 1;
            if mu % 2 == 0 || mu >> index != 0 {
                return Err(LdsError::SobolDirection { dim, index, value: mu });
            }
        }
        let mut mu: Vec<u64> = rec.initial.iter().copied().take(m).collect();
        for j in q..m {
            // mu_j = (xor_k 2^k alpha_k mu_{j-k}) ^ mu_{j-q}, alpha_q = 1.
            let mut next = mu[j - q] ^ (mu[j - q] << q);
            for k in 1..q {
                let alpha = (rec.coeffs >> (q - 1 - k)) & 1;
                if alpha == 1 {
                    next ^= mu[j - k] << k;
                }
            }
            mu.push(next);
        }
        coords.push(SobolCoordinate::from_directions(rec.degree, rec.coeffs, mu, depth));
    }
    Ok(SobolParams { depth, coords })
}

impl SobolParams {
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coordinate(&self, i: usize) -> &SobolCoordinate {
        &self.coords[i]
    }

    /// Largest index representable at this depth.
    pub fn max_index(&self) -> u64 {
        (1u64 << self.depth) - 1
    }

    /// Output digits of coordinate `i` at index `omega` by the matrix-vector
    /// definition: the xor of the columns selected by the bits of `omega`.
    pub fn point_bits(&self, omega: u64, i: usize) -> u64 {
        let cols = &self.coords[i].columns;
        let mut y = 0;
        let mut w = omega;
        let mut c = 0;
        while w != 0 {
            if w & 1 == 1 {
                y ^= cols[c];
            }
            w >>= 1;
            c += 1;
        }
        y
    }

    /// Fills `out` (row-major, `count x d`) with digit words for indices
    /// `first, first + 1, ...`. Only the first row uses the matrix-vector
    /// product; later rows xor one carry word, which reproduces the definition
    /// index for index.
    pub(crate) fn fill_bits(&self, first: u64, count: usize, out: &mut [u64]) {
        let d = self.coords.len();
        for (i, slot) in out[..d].iter_mut().enumerate() {
            *slot = self.point_bits(first, i);
        }
        for row in 1..count {
            let t = (first + row as u64).trailing_zeros() as usize;
            let (prev, cur) = out[(row - 1) * d..(row + 1) * d].split_at_mut(d);
            for i in 0..d {
                cur[i] = prev[i] ^ self.coords[i].carries[t];
            }
        }
    }

    pub(crate) fn check_range(&self, first: u64, count: usize) -> Result<(), LdsError> {
        let last = first.checked_add(count as u64 - 1).unwrap_or(u64::MAX);
        if last > self.max_index() {
            return Err(LdsError::IndexOverflow { index: last, depth: self.depth });
        }
        Ok(())
    }
}

/// Converts an `depth`-bit digit word to a double in `[0, 1)`.
#[inline]
pub(crate) fn bits_to_unit(y: u64, depth: u32) -> f64 {
    use super::digits::pow2_neg;
    if depth <= 53 {
        y as f64 * pow2_neg(depth)
    } else {
        (y >> (depth - 53)) as f64 * pow2_neg(53)
    }
}

/// Sobol' points `omega = skip + 1, ..., skip + n`.
pub fn sobol_points(n: usize, d: usize, skip: u64, params: &SobolParams) -> Result<PointSet, LdsError> {
    if n == 0 {
        return Err(LdsError::EmptyCount);
    }
    if d > params.dim() {
        return Err(LdsError::MissingSobolDim(params.dim() + 1));
    }
    let first = skip + 1;
    params.check_range(first, n)?;
    let full = params.dim();
    let mut bits = vec![0u64; n * full];
    params.fill_bits(first, n, &mut bits);
    let coords = bits
        .chunks_exact(full)
        .flat_map(|row| row[..d].iter().map(|&y| bits_to_unit(y, params.depth)))
        .collect();
    PointSet::new(d, coords, PointSetMeta::new(Family::Sobol, vec![Some(2); d], skip))
}
