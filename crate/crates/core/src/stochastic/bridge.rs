//! Monitoring grids and Brownian path construction.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::StochasticError;

/// Strictly increasing positive monitoring times `t_1 < ... < t_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self, StochasticError> {
        if times.is_empty() {
            return Err(StochasticError::EmptyGrid);
        }
        let mut prev = 0.0;
        for (i, &t) in times.iter().enumerate() {
            if !(t.is_finite() && t > prev) {
                return Err(StochasticError::GridOrder { index: i, value: t });
            }
            prev = t;
        }
        Ok(TimeGrid { times })
    }

    /// Equispaced grid `t_i = i·T/m`.
    pub fn uniform(m: usize, maturity: f64) -> Result<Self, StochasticError> {
        TimeGrid::new((1..=m).map(|i| maturity * i as f64 / m as f64).collect())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn maturity(&self) -> f64 {
        self.times[self.times.len() - 1]
    }
}

impl TryFrom<Vec<f64>> for TimeGrid {
    type Error = StochasticError;

    fn try_from(times: Vec<f64>) -> Result<Self, Self::Error> {
        TimeGrid::new(times)
    }
}

impl From<TimeGrid> for Vec<f64> {
    fn from(g: TimeGrid) -> Self {
        g.times
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathConstruction {
    Forward,
    Bridge,
}

impl fmt::Display for PathConstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathConstruction::Forward => "forward",
            PathConstruction::Bridge => "bridge",
        })
    }
}

impl FromStr for PathConstruction {
    type Err = StochasticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "forward" => Ok(PathConstruction::Forward),
            "bridge" | "brownian-bridge" => Ok(PathConstruction::Bridge),
            other => Err(StochasticError::UnknownConstruction(other.to_string())),
        }
    }
}

/// Order in which the bridge resolves grid indices (1-based): the terminal
/// index first, then floor midpoints of bracketing resolved indices,
/// breadth-first and left to right.
pub fn bb_ordering(m: usize) -> Vec<usize> {
    if m == 0 {
        return Vec::new();
    }
    let mut order = Vec::with_capacity(m);
    order.push(m);
    let mut queue = VecDeque::from([(0usize, m)]);
    while let Some((lo, hi)) = queue.pop_front() {
        if hi - lo < 2 {
            continue;
        }
        let mid = (lo + hi) / 2;
        order.push(mid);
        queue.push_back((lo, mid));
        queue.push_back((mid, hi));
    }
    order
}

#[derive(Debug, Clone, Copy)]
struct BridgeStep {
    target: usize,
    left: Option<usize>,
    right: usize,
    w_left: f64,
    w_right: f64,
    sd: f64,
}

/// Precomputed path builder for a fixed grid. Variate `k` of the input
/// feeds grid index `bb_ordering(m)[k]` in bridge mode, or the `k`-th
/// increment in forward mode.
#[derive(Debug, Clone)]
pub struct PathBuilder {
    construction: PathConstruction,
    grid: TimeGrid,
    increments: Vec<f64>,
    terminal_sd: f64,
    steps: Vec<BridgeStep>,
}

impl PathBuilder {
    pub fn new(grid: TimeGrid, construction: PathConstruction) -> Self {
        let t = grid.times();
        let increments = t
            .iter()
            .scan(0.0, |prev, &ti| {
                let dt = ti - *prev;
                *prev = ti;
                Some(dt.sqrt())
            })
            .collect();
        let m = t.len();
        let order = bb_ordering(m);
        let mut resolved = vec![false; m];
        resolved[m - 1] = true;
        let mut steps = Vec::with_capacity(m - 1);
        for &idx in &order[1..] {
            let target = idx - 1;
            let left = (0..target).rev().find(|&j| resolved[j]);
            let right = (target + 1..m).find(|&j| resolved[j]).expect("terminal index is resolved first");
            let ta = left.map_or(0.0, |j| t[j]);
            let (tt, tb) = (t[target], t[right]);
            let span = tb - ta;
            steps.push(BridgeStep {
                target,
                left,
                right,
                w_left: (tb - tt) / span,
                w_right: (tt - ta) / span,
                sd: ((tt - ta) * (tb - tt) / span).sqrt(),
            });
            resolved[target] = true;
        }
        PathBuilder { construction, terminal_sd: t[m - 1].sqrt(), grid, increments, steps }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn construction(&self) -> PathConstruction {
        self.construction
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Writes `W(t_1..t_m)` driven by the normals `z` (both of length `m`).
    pub fn build(&self, z: &[f64], w: &mut [f64]) {
        debug_assert_eq!(z.len(), self.len());
        match self.construction {
            PathConstruction::Forward => {
                let mut acc = 0.0;
                for ((wi, &zi), &s) in w.iter_mut().zip(z).zip(&self.increments) {
                    acc += s * zi;
                    *wi = acc;
                }
            }
            PathConstruction::Bridge => {
                let m = self.len();
                w[m - 1] = self.terminal_sd * z[0];
                for (step, &zk) in self.steps.iter().zip(&z[1..]) {
                    let wa = step.left.map_or(0.0, |j| w[j]);
                    w[step.target] = step.w_left * wa + step.w_right * w[step.right] + step.sd * zk;
                }
            }
        }
    }
}

/// Brownian values at the grid for the given normals.
pub fn brownian_path(z: &[f64], grid: &TimeGrid, construction: PathConstruction) -> Result<Vec<f64>, StochasticError> {
    if z.len() != grid.len() {
        return Err(StochasticError::Length { expected: grid.len(), got: z.len() });
    }
    let mut w = vec![0.0; z.len()];
    PathBuilder::new(grid.clone(), construction).build(z, &mut w);
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_examples() {
        assert_eq!(bb_ordering(1), vec![1]);
        assert_eq!(bb_ordering(2), vec![2, 1]);
        assert_eq!(bb_ordering(4), vec![4, 2, 1, 3]);
        assert_eq!(bb_ordering(8), vec![8, 4, 2, 6, 1, 3, 5, 7]);
        assert_eq!(bb_ordering(5), vec![5, 2, 1, 3, 4]);
    }

    #[test]
    fn zero_normals_give_zero_path() {
        let g = TimeGrid::uniform(7, 1.5).unwrap();
        for c in [PathConstruction::Forward, PathConstruction::Bridge] {
            assert!(brownian_path(&[0.0; 7], &g, c).unwrap().iter().all(|&w| w == 0.0));
        }
    }

    #[test]
    fn bridge_small_cases() {
        let t = 2.0;
        let g1 = TimeGrid::new(vec![t]).unwrap();
        assert_eq!(brownian_path(&[0.7], &g1, PathConstruction::Bridge).unwrap(), vec![t.sqrt() * 0.7]);
        let g2 = TimeGrid::new(vec![t / 2.0, t]).unwrap();
        let (z1, z2) = (0.3, -1.1);
        let w = brownian_path(&[z1, z2], &g2, PathConstruction::Bridge).unwrap();
        assert_eq!(w[1], t.sqrt() * z1);
        assert!((w[0] - (w[1] / 2.0 + (t / 4.0).sqrt() * z2)).abs() < 1e-15);
    }

    #[test]
    fn forward_is_cumulative() {
        let g = TimeGrid::new(vec![0.25, 1.0, 2.0]).unwrap();
        let w = brownian_path(&[1.0, 2.0, 3.0], &g, PathConstruction::Forward).unwrap();
        assert_eq!(w, vec![0.5, 0.5 + 2.0 * 0.75f64.sqrt(), 0.5 + 2.0 * 0.75f64.sqrt() + 3.0]);
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(vec![]).is_err());
        assert!(TimeGrid::new(vec![0.0, 1.0]).is_err());
        assert!(TimeGrid::new(vec![0.5, 0.5]).is_err());
        assert!(brownian_path(&[0.0; 2], &TimeGrid::uniform(3, 1.0).unwrap(), PathConstruction::Bridge).is_err());
        assert_eq!(TimeGrid::uniform(120, 1.0).unwrap().maturity(), 1.0);
    }
}
