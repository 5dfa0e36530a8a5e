use serde::{Deserialize, Serialize};

use crate::numerics::OdeGrid;
use crate::{Error, Result};

/// Piecewise-linear control sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlTrajectory {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl ControlTrajectory {
    pub fn new(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        let grid = OdeGrid::new(times, values)?;
        if grid.len() < 2 {
            return Err(Error::param("times", "a control needs at least two nodes"));
        }
        Ok(Self { times: grid.times, values: grid.states })
    }

    pub fn from_fn(times: &[f64], f: impl Fn(f64) -> Vec<f64>) -> Result<Self> {
        Self::new(times.to_vec(), times.iter().map(|&t| f(t)).collect())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn t0(&self) -> f64 {
        self.times[0]
    }

    pub fn t1(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Linear interpolation; clamps outside the grid.
    pub fn at(&self, t: f64) -> Vec<f64> {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.values[0].clone();
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1].clone();
        }
        let j = self.times.partition_point(|&s| s <= t).clamp(1, n - 1);
        let (ta, tb) = (self.times[j - 1], self.times[j]);
        let w = (t - ta) / (tb - ta);
        self.values[j - 1]
            .iter()
            .zip(&self.values[j])
            .map(|(a, b)| a + w * (b - a))
            .collect()
    }

    /// Value at the midpoint of interval `i`.
    pub fn midpoint(&self, i: usize) -> Vec<f64> {
        self.values[i].iter().zip(&self.values[i + 1]).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn same_grid(&self, other: &ControlTrajectory) -> bool {
        self.times.len() == other.times.len()
            && self.times.iter().zip(&other.times).all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
    }

    /// `self + s·other` on a shared grid.
    pub fn axpy(&self, s: f64, other: &ControlTrajectory) -> Result<Self> {
        if !self.same_grid(other) || self.dim() != other.dim() {
            return Err(Error::param("h", "variation must share the control grid and dimension"));
        }
        Ok(Self {
            times: self.times.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| crate::numerics::axpy(s, b, a))
                .collect(),
        })
    }
}

/// Cubic Hermite interpolant of a state trajectory through its nodes and
/// node derivatives; fourth-order accurate between RK4 nodes.
#[derive(Debug, Clone)]
pub struct StateInterpolant<'a> {
    pub grid: &'a OdeGrid,
    pub derivs: Vec<Vec<f64>>,
}

impl StateInterpolant<'_> {
    /// State at fraction `s ∈ [0, 1]` of interval `i`.
    pub fn within(&self, i: usize, s: f64) -> Vec<f64> {
        let h = self.grid.times[i + 1] - self.grid.times[i];
        let (xa, xb) = (&self.grid.states[i], &self.grid.states[i + 1]);
        let (da, db) = (&self.derivs[i], &self.derivs[i + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        (0..xa.len())
            .map(|k| h00 * xa[k] + h10 * h * da[k] + h01 * xb[k] + h11 * h * db[k])
            .collect()
    }
}
