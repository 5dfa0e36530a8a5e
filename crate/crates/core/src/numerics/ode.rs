use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// States sampled on a strictly monotone time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeGrid {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl OdeGrid {
    pub fn new(times: Vec<f64>, states: Vec<Vec<f64>>) -> Result<Self> {
        if times.len() != states.len() || times.is_empty() {
            return Err(Error::dim("grid needs one state per time and at least one node"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("times", "must be strictly increasing"));
        }
        let dim = states[0].len();
        if states.iter().any(|s| s.len() != dim) {
            return Err(Error::dim("state dimension varies across the grid"));
        }
        Ok(Self { times, states })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("non-empty grid")
    }

    /// One component across the grid.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[k]).collect()
    }
}

/// Uniform grid with `steps + 1` nodes from `t0` to `t1` inclusive.
pub fn uniform_times(t0: f64, t1: f64, steps: usize) -> Vec<f64> {
    let h = (t1 - t0) / steps as f64;
    (0..=steps)
        .map(|i| if i == steps { t1 } else { t0 + h * i as f64 })
        .collect()
}

/// Classical fixed-step RK4 from `t0` to `t1`.
pub fn integrate_ode<F>(field: F, initial: &[f64], t0: f64, t1: f64, steps: usize) -> Result<OdeGrid>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    if steps == 0 {
        return Err(Error::param("steps", "must be at least 1"));
    }
    if !(t1 > t0) {
        return Err(Error::param("t1", "must exceed t0"));
    }
    let times = uniform_times(t0, t1, steps);
    let states = rk4_on_times(&field, initial, &times)?;
    Ok(OdeGrid { times, states })
}

/// RK4 through an arbitrary monotone sequence of nodes, one step per
/// interval. The nodes may be decreasing, which integrates backwards.
pub fn rk4_on_times<F>(field: &F, initial: &[f64], times: &[f64]) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let mut states = Vec::with_capacity(times.len());
    let mut y = initial.to_vec();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergence { time: times[0] });
    }
    states.push(y.clone());
    for w in times.windows(2) {
        y = rk4_step(field, w[0], &y, w[1] - w[0]);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { time: w[1] });
        }
        states.push(y.clone());
    }
    Ok(states)
}

pub fn rk4_step<F>(field: &F, t: f64, y: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let shifted = |k: &[f64], c: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + c * b).collect() };
    let k1 = field(t, y);
    let k2 = field(t + 0.5 * h, &shifted(&k1, 0.5 * h));
    let k3 = field(t + 0.5 * h, &shifted(&k2, 0.5 * h));
    let k4 = field(t + h, &shifted(&k3, h));
    y.iter()
        .enumerate()
        .map(|(i, yi)| yi + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_is_constant() {
        let g = integrate_ode(|_, _| vec![0.0, 0.0], &[1.5, -2.0], 0.0, 1.0, 10).unwrap();
        assert_eq!(g.len(), 11);
        assert!(g.states.iter().all(|s| s == &vec![1.5, -2.0]));
    }

    #[test]
    fn unit_field_is_exact() {
        let g = integrate_ode(|_, _| vec![1.0], &[0.0], 0.0, 1.0, 7).unwrap();
        assert_eq!(g.times[7], 1.0);
        assert!((g.last()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |steps| {
            let g = integrate_ode(|_, y| vec![y[0]], &[1.0], 0.0, 1.0, steps).unwrap();
            (g.last()[0] - std::f64::consts::E).abs()
        };
        let ratio = err(20) / err(40);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn divergence_is_reported() {
        let r = integrate_ode(|_, y| vec![y[0] * y[0] * 1e10], &[1e10], 0.0, 1.0, 100);
        assert!(matches!(r, Err(Error::Divergence { .. })));
    }

    #[test]
    fn backward_nodes() {
        let times = uniform_times(1.0, 0.0, 50);
        let s = rk4_on_times(&|_, y: &[f64]| vec![y[0]], &[1.0], &times).unwrap();
        assert!((s.last().unwrap()[0] - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn grid_validation() {
        assert!(OdeGrid::new(vec![0.0, 0.0], vec![vec![1.0], vec![1.0]]).is_err());
        assert!(OdeGrid::new(vec![0.0, 1.0], vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(integrate_ode(|_, _| vec![0.0], &[0.0], 1.0, 0.0, 3).is_err());
        assert!(integrate_ode(|_, _| vec![0.0], &[0.0], 0.0, 1.0, 0).is_err());
    }
}
