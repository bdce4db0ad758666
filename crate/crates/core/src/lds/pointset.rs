use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{LdsError, ScrambleMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    VanDerCorput,
    Halton,
    Hammersley,
    Faure,
    Sobol,
    /// Pseudo-random uniforms (plain Monte Carlo).
    Random,
    /// Points of unknown origin, e.g. read back from CSV.
    External,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::VanDerCorput => "vdc",
            Family::Halton => "halton",
            Family::Hammersley => "hammersley",
            Family::Faure => "faure",
            Family::Sobol => "sobol",
            Family::Random => "random",
            Family::External => "external",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = LdsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "vdc" | "van-der-corput" => Family::VanDerCorput,
            "halton" => Family::Halton,
            "hammersley" => Family::Hammersley,
            "faure" => Family::Faure,
            "sobol" => Family::Sobol,
            "random" | "mc" => Family::Random,
            "external" => Family::External,
            other => return Err(LdsError::UnknownFamily(other.to_string())),
        })
    }
}

/// How a point set was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSetMeta {
    pub family: Family,
    /// Digit base of each coordinate; `None` where the coordinate is not a
    /// digital construction (Hammersley ladder, pseudo-random).
    pub bases: Vec<Option<u32>>,
    pub skip: u64,
    pub include_origin: bool,
    pub scramble: ScrambleMode,
    pub seed: Option<u64>,
}

impl PointSetMeta {
    pub fn new(family: Family, bases: Vec<Option<u32>>, skip: u64) -> Self {
        Self { family, bases, skip, include_origin: false, scramble: ScrambleMode::None, seed: None }
    }

    /// True when estimates over the set are random variables (pseudo-random
    /// or randomized QMC), so a sample standard error is meaningful.
    pub fn is_randomized(&self) -> bool {
        self.family == Family::Random || self.scramble != ScrambleMode::None
    }
}

/// An immutable `n x d` set of points in `[0, 1)^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    n: usize,
    d: usize,
    coords: Vec<f64>,
    meta: PointSetMeta,
}

impl PointSet {
    pub fn new(d: usize, coords: Vec<f64>, meta: PointSetMeta) -> Result<Self, LdsError> {
        if d == 0 {
            return Err(LdsError::InvalidDimension(0));
        }
        if coords.is_empty() {
            return Err(LdsError::EmptyCount);
        }
        if coords.len() % d != 0 {
            return Err(LdsError::Shape(format!("{} values is not a multiple of d = {d}", coords.len())));
        }
        if meta.bases.len() != d {
            return Err(LdsError::Shape(format!("{} bases for d = {d}", meta.bases.len())));
        }
        if let Some(pos) = coords.iter().position(|v| !(0.0..1.0).contains(v)) {
            return Err(LdsError::OutOfRange { row: pos / d, col: pos % d, value: coords[pos] });
        }
        Ok(Self { n: coords.len() / d, d, coords, meta })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn meta(&self) -> &PointSetMeta {
        &self.meta
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.coords[j * self.d..(j + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.d)
    }

    /// Values of coordinate `i` (zero-based) across all points.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.rows().map(|p| p[i]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    /// Concatenates two sets of equal dimension; the metadata of `self` is kept.
    pub fn concat(&self, other: &PointSet) -> Result<PointSet, LdsError> {
        if self.d != other.d {
            return Err(LdsError::Shape(format!("cannot join d = {} with d = {}", self.d, other.d)));
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        PointSet::new(self.d, coords, self.meta.clone())
    }

    /// Writes `x1,...,xd` then one row per point with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), LdsError> {
        let header: Vec<String> = (1..=self.d).map(|i| format!("x{i}")).collect();
        writeln!(w, "{}", header.join(","))?;
        let mut line = String::new();
        for row in self.rows() {
            line.clear();
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{v:.16e}"));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Reads the CSV layout produced by [`PointSet::write_csv`]. The result is
    /// tagged [`Family::External`] with no digit bases.
    pub fn read_csv<R: BufRead>(r: R) -> Result<PointSet, LdsError> {
        let mut lines = r.lines();
        let header = lines.next().ok_or(LdsError::Csv { line: 1, message: "empty input".into() })??;
        let names: Vec<&str> = header.trim().split(',').map(str::trim).collect();
        for (i, name) in names.iter().enumerate() {
            if *name != format!("x{}", i + 1) {
                return Err(LdsError::Csv { line: 1, message: format!("expected header x{}, found `{name}`", i + 1) });
            }
        }
        let d = names.len();
        let mut coords = Vec::new();
        for (k, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let before = coords.len();
            for field in line.split(',') {
                let v: f64 = field.trim().parse().map_err(|_| LdsError::Csv {
                    line: k + 2,
                    message: format!("`{}` is not a number", field.trim()),
                })?;
                coords.push(v);
            }
            if coords.len() - before != d {
                return Err(LdsError::Csv { line: k + 2, message: format!("expected {d} fields") });
            }
        }
        PointSet::new(d, coords, PointSetMeta::new(Family::External, vec![None; d], 0))
    }
}
