use serde::{Deserialize, Serialize};

use super::StochasticError;

const PIVOT_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;

/// Dense square matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, StochasticError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(StochasticError::NotSquare);
        }
        Ok(Matrix { n, data: rows.concat() })
    }

    /// Equicorrelation matrix: unit diagonal, `rho` elsewhere.
    pub fn equicorrelated(n: usize, rho: f64) -> Self {
        let mut m = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m.data[i * n + j] = rho;
                }
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Checks symmetry and the unit diagonal. Positive semidefiniteness is
    /// established by [`cholesky`].
    pub fn validate_correlation(&self) -> Result<(), StochasticError> {
        for i in 0..self.n {
            if (self.get(i, i) - 1.0).abs() > SYMMETRY_TOL {
                return Err(StochasticError::Diagonal { index: i, value: self.get(i, i) });
            }
            for j in 0..i {
                if (self.get(i, j) - self.get(j, i)).abs() > SYMMETRY_TOL || !self.get(i, j).is_finite() {
                    return Err(StochasticError::Asymmetric { row: i, col: j });
                }
            }
        }
        Ok(())
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = StochasticError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self, Self::Error> {
        Matrix::from_rows(rows)
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.to_rows()
    }
}

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = ρ`.
pub fn cholesky(rho: &Matrix) -> Result<Matrix, StochasticError> {
    rho.validate_correlation()?;
    let n = rho.n;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut pivot = rho.get(j, j);
        for k in 0..j {
            pivot -= l[j * n + k] * l[j * n + k];
        }
        if pivot.is_nan() || pivot < PIVOT_TOL {
            return Err(StochasticError::NotPositiveDefinite { index: j, pivot });
        }
        let ljj = pivot.sqrt();
        l[j * n + j] = ljj;
        for i in j + 1..n {
            let mut s = rho.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / ljj;
        }
    }
    Ok(Matrix { n, data: l })
}

/// `out = L z` for a lower-triangular `L`.
pub fn lower_mul(l: &Matrix, z: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate().take(l.n) {
        *o = l.row(i)[..=i].iter().zip(z).map(|(a, b)| a * b).sum();
    }
}
