use serde::{Deserialize, Serialize};

use super::canonical::{costate_from_lagrangian, CostateTrajectory, Regime};
use super::system::QuadraticLagrangianSystem;
use crate::numerics::quadrature::differentiate_uniform;
use crate::numerics::{norm_inf, rank, sub, Matrix, OdeGrid};
use crate::variational::{constraint_residual, el_residual, simulate_state, ControlSystem, ControlTrajectory};
use crate::{tolerances, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LagrangianToHamiltonian,
    HamiltonianToLagrangian,
}

/// A trajectory in either description.
#[derive(Debug, Clone)]
pub enum TrajectoryInput {
    Lagrangian { x0: Vec<f64>, u: ControlTrajectory, mu: Vec<f64> },
    Hamiltonian { x: OdeGrid, p: CostateTrajectory, mu: Vec<f64> },
}

/// Maximum residuals over the grid, absolute and relative to the size of the
/// balanced terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub direction: Direction,
    pub regime: String,
    /// `x' − ∇ₚH`.
    pub state_residual: f64,
    /// `p' + ∇ₓH`.
    pub costate_residual: f64,
    /// `p(t1)` against the regime's terminal value.
    pub terminal_residual: f64,
    /// `u − φ(x, p)`.
    pub legendre_residual: f64,
    /// Generalized Euler–Lagrange residual along `u`.
    pub el_residual: f64,
    /// `∫ (B u + α) dt`, when constrained.
    pub constraint_residual: Option<f64>,
    pub state_scale: f64,
    pub costate_scale: f64,
    pub control_scale: f64,
    pub max_relative: f64,
}

fn grid_step(times: &[f64]) -> Result<f64> {
    if times.len() < 5 {
        return Err(Error::param("times", "need at least five nodes"));
    }
    let h = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    let uneven = times.windows(2).map(|w| (w[1] - w[0] - h).abs()).fold(0.0, f64::max);
    if uneven > 1e-9 * h {
        return Err(Error::param("times", "residual checks need a uniform grid"));
    }
    Ok(h)
}

fn derivative(h: f64, values: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = values[0].len();
    let cols: Vec<Vec<f64>> = (0..dim)
        .map(|k| differentiate_uniform(h, &values.iter().map(|v| v[k]).collect::<Vec<_>>()))
        .collect();
    (0..values.len()).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

fn max_gap(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| norm_inf(&sub(x, y))).fold(0.0, f64::max)
}

fn max_norm(a: &[Vec<f64>]) -> f64 {
    a.iter().map(|v| norm_inf(v)).fold(0.0, f64::max)
}

fn ratio(r: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        r / scale
    } else {
        r
    }
}

/// Checks the canonical equations against the Euler–Lagrange description.
///
/// From a Lagrangian trajectory the costate is built by the adjoint and the
/// canonical residuals are measured; from a Hamiltonian trajectory the
/// control `u = φ(x, p)` is formed and the Euler–Lagrange residual is
/// measured. Both report every residual that is computable.
pub fn verify_equivalence(
    sys: &QuadraticLagrangianSystem,
    input: &TrajectoryInput,
    regime: &Regime,
) -> Result<EquivalenceReport> {
    let (direction, x, p, u, mu) = match input {
        TrajectoryInput::Lagrangian { x0, u, mu } => {
            let x = simulate_state(sys, u, x0)?;
            let p = costate_from_lagrangian(sys, &x, u, mu, regime)?;
            (Direction::LagrangianToHamiltonian, x, p, u.clone(), mu.clone())
        }
        TrajectoryInput::Hamiltonian { x, p, mu } => {
            if x.times != p.times {
                return Err(Error::param("p", "state and costate must share the grid"));
            }
            let ham = regime.hamiltonian(sys, mu)?;
            let values = x.states.iter().zip(&p.values).map(|(xi, pi)| ham.phi(xi, pi)).collect();
            let u = ControlTrajectory::new(x.times.clone(), values)?;
            (Direction::HamiltonianToLagrangian, x.clone(), p.clone(), u, mu.clone())
        }
    };
    let h = grid_step(&x.times)?;
    let ham = regime.hamiltonian(sys, &mu)?;
    let n = sys.state_dim();

    let grad_p: Vec<Vec<f64>> = x.states.iter().zip(&p.values).map(|(xi, pi)| ham.grad_p(xi, pi)).collect();
    let grad_x: Vec<Vec<f64>> = x.states.iter().zip(&p.values).map(|(xi, pi)| ham.grad_x(xi, pi)).collect();
    let phi: Vec<Vec<f64>> = x.states.iter().zip(&p.values).map(|(xi, pi)| ham.phi(xi, pi)).collect();

    let state_rates: Vec<Vec<f64>> = match direction {
        Direction::LagrangianToHamiltonian => {
            x.states.iter().zip(&u.values).map(|(xi, ui)| sys.f(xi, ui)).collect()
        }
        Direction::HamiltonianToLagrangian => derivative(h, &x.states),
    };
    let state_residual = max_gap(&state_rates, &grad_p);
    let p_dot = derivative(h, &p.values);
    let neg_grad_x: Vec<Vec<f64>> = grad_x.iter().map(|g| g.iter().map(|v| -v).collect()).collect();
    let costate_residual = max_gap(&p_dot, &neg_grad_x);
    let terminal = regime.terminal_costate(n, &mu)?;
    let terminal_residual = norm_inf(&sub(p.terminal(), &terminal));
    let legendre_residual = max_gap(&u.values, &phi);

    let constrained = !matches!(regime, Regime::Unconstrained);
    let el_sys = if constrained { sys.clone() } else { sys.without_constraint() };
    let el_mu: &[f64] = if constrained { &mu } else { &[] };
    let el = el_residual(&el_sys, &u, &x.states[0], el_mu)?;
    let el_max = max_norm(&el.states);
    let constraint = if constrained {
        Some(norm_inf(&constraint_residual(&el_sys, &u, &x.states[0])?))
    } else {
        None
    };

    let state_scale = max_norm(&grad_p);
    let costate_scale = max_norm(&grad_x);
    let control_scale = u.values.iter().map(|v| norm_inf(&sys.r.mul_vec(v))).fold(0.0, f64::max);
    let u_scale = max_norm(&u.values);
    let p_scale = max_norm(&p.values).max(norm_inf(&terminal));
    let max_relative = [
        ratio(state_residual, state_scale),
        ratio(costate_residual, costate_scale),
        ratio(terminal_residual, p_scale),
        ratio(legendre_residual, u_scale),
        ratio(el_max, control_scale),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    Ok(EquivalenceReport {
        direction,
        regime: regime.name().to_string(),
        state_residual,
        costate_residual,
        terminal_residual,
        legendre_residual,
        el_residual: el_max,
        constraint_residual: constraint,
        state_scale,
        costate_scale,
        control_scale,
        max_relative,
    })
}

/// `rank A = rank [A; B]`, the condition for writing `B = Q A`.
pub fn rank_condition(a: &Matrix, b: &Matrix) -> Result<bool> {
    let stacked = a.vstack(b)?;
    Ok(rank(a, tolerances::RANK)? == rank(&stacked, tolerances::RANK)?)
}

/// A `Q` with `B = Q A`, by least squares through `A Aᵀ`, when the rank
/// condition holds and `A` has full row rank.
pub fn factor_through(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if !rank_condition(a, b)? {
        return Err(Error::param("B", "rows of B are not in the row space of A"));
    }
    let aat = a * &a.transpose();
    let inv = aat.inverse()?;
    let q = &(b * &a.transpose()) * &inv;
    let gap = (&(&q * a) - b).max_abs();
    if gap > 1e-10 * b.max_abs().max(1.0) {
        return Err(Error::Singular);
    }
    Ok(q)
}
