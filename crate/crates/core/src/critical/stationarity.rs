use serde::{Deserialize, Serialize};

use super::bvp::BvpSolution;
use crate::circuit::CircuitParams;
use crate::numerics::quadrature::{tail_integrals_hermite, trapezoid};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    /// Largest deviation of any stationarity expression from its time mean.
    pub max_deviation: f64,
    /// Time means, i.e. the estimated `(l3, l5, l6)`.
    pub constants: [f64; 3],
    /// Magnitude of the terms entering the expressions.
    pub scale: f64,
}

impl StationarityReport {
    pub fn relative_deviation(&self) -> f64 {
        if self.scale > 0.0 {
            self.max_deviation / self.scale
        } else {
            self.max_deviation
        }
    }
}

/// Evaluates, at every node,
/// `(M i)_1 − (1/C1)∫_t^{t1} q1`, `(M i)_2 − (1/C2)∫_t^{t1} q2`,
/// `(M i)_3 − (1/C2)∫_t^{t1} q2` for sampled currents and charges.
/// Tail integrals use the derivative-corrected trapezoid rule with
/// `q1' = i3`, `q2' = i5 + i6`.
pub fn stationarity_expressions(
    params: &CircuitParams,
    times: &[f64],
    q: &[[f64; 2]],
    i: &[[f64; 3]],
) -> Result<Vec<[f64; 3]>> {
    if times.len() != q.len() || times.len() != i.len() || times.len() < 2 {
        return Err(Error::dim("stationarity check needs matching grids of at least two nodes"));
    }
    let m = params.inductance_matrix();
    let q1: Vec<f64> = q.iter().map(|v| v[0]).collect();
    let q2: Vec<f64> = q.iter().map(|v| v[1]).collect();
    let d1: Vec<f64> = i.iter().map(|v| v[0]).collect();
    let d2: Vec<f64> = i.iter().map(|v| v[1] + v[2]).collect();
    let w1 = tail_integrals_hermite(times, &q1, &d1);
    let w2 = tail_integrals_hermite(times, &q2, &d2);
    Ok(i.iter()
        .enumerate()
        .map(|(k, cur)| {
            let mi = m.mul_vec(cur);
            [
                mi[0] - w1[k] / params.c1,
                mi[1] - w2[k] / params.c2,
                mi[2] - w2[k] / params.c2,
            ]
        })
        .collect())
}

pub fn stationarity_report(
    params: &CircuitParams,
    times: &[f64],
    q: &[[f64; 2]],
    i: &[[f64; 3]],
) -> Result<StationarityReport> {
    let expr = stationarity_expressions(params, times, q, i)?;
    let span = times[times.len() - 1] - times[0];
    let mut constants = [0.0; 3];
    let mut max_deviation: f64 = 0.0;
    for k in 0..3 {
        let series: Vec<f64> = expr.iter().map(|e| e[k]).collect();
        let mean = trapezoid(times, &series) / span;
        constants[k] = mean;
        max_deviation = series.iter().fold(max_deviation, |acc, v| acc.max((v - mean).abs()));
    }
    let m = params.inductance_matrix();
    let kinetic = i.iter().map(|c| crate::numerics::norm_inf(&m.mul_vec(c))).fold(0.0, f64::max);
    let capacitive = q
        .iter()
        .map(|v| (v[0] / params.c1).abs().max((v[1] / params.c2).abs()) * span)
        .fold(0.0, f64::max);
    Ok(StationarityReport {
        max_deviation,
        constants,
        scale: kinetic.max(capacitive),
    })
}

/// Stationarity check of a solved trajectory.
pub fn stationarity_residual(params: &CircuitParams, solution: &BvpSolution) -> Result<StationarityReport> {
    let tol = 1e-9 * params.horizon();
    let times = solution.times();
    if (times[0] - params.t0).abs() > tol || (times[times.len() - 1] - params.t1).abs() > tol {
        return Err(Error::param("solution", "trajectory does not span the circuit horizon"));
    }
    stationarity_report(params, times, &solution.charges(), &solution.currents())
}
