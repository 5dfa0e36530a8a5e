//! Critical points of the constrained circuit action.
//!
//! With loop charges `x(t) = ∫_{t0}^{t} i`, stationarity reduces to
//! `M x'' + N x = a`, `x(t0) = 0`, `x(t1) = λ`, solved in closed form through
//! the propagator `Φ`. The problem is uniquely solvable unless some
//! `(t1 − t0)√h_i` is a positive multiple of `π`.

mod bvp;
mod propagator;
mod stationarity;

pub use bvp::{
    boundary_rhs, resonance_analysis, solve_critical_point, uniqueness_check, BvpSolution, CriticalFamily,
    ResonanceReport, ResonantMode,
};
pub use propagator::{propagators, PropagatorPair};
pub use stationarity::{stationarity_expressions, stationarity_report, stationarity_residual, StationarityReport};

#[cfg(test)]
mod tests;
