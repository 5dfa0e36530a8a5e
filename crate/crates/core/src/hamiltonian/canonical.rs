use serde::{Deserialize, Serialize};

use super::legendre::{legendre_transform, HamiltonianSpec};
use super::system::QuadraticLagrangianSystem;
use crate::numerics::quadrature::simpson_uniform;
use crate::numerics::{norm_inf, rk4_on_times, uniform_times, Matrix, OdeGrid};
use crate::variational::{adjoint, ControlSystem, ControlTrajectory};
use crate::tolerances::{MAX_NEWTON_ITERATIONS as MAX_NEWTON, SHOOTING as SHOOTING_TOL};
use crate::{Error, Result};

const MULTIPLIER_TOL: f64 = 1e-9;

/// Which canonical system a constrained problem is mapped to.
#[derive(Debug, Clone, PartialEq)]
pub enum Regime {
    /// No integral constraint; `p(t1) = 0`.
    Unconstrained,
    /// `B = Q A`: unshifted Hamiltonian with `p(t1) = Qᵀμ`.
    SpecialQ(Matrix),
    /// `μ`-shifted Hamiltonian with `p(t1) = 0`.
    General,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Unconstrained => "unconstrained",
            Regime::SpecialQ(_) => "special_q",
            Regime::General => "general",
        }
    }

    /// `p(t1)` for this regime.
    pub fn terminal_costate(&self, n: usize, mu: &[f64]) -> Result<Vec<f64>> {
        match self {
            Regime::SpecialQ(q) => {
                if q.cols() != n || q.rows() != mu.len() {
                    return Err(Error::dim(format!(
                        "Q is {}x{} but needs {}x{n}",
                        q.rows(),
                        q.cols(),
                        mu.len()
                    )));
                }
                Ok(q.vec_mul(mu))
            }
            _ => Ok(vec![0.0; n]),
        }
    }

    /// The Hamiltonian this regime integrates.
    pub fn hamiltonian(&self, sys: &QuadraticLagrangianSystem, mu: &[f64]) -> Result<HamiltonianSpec> {
        match self {
            Regime::Unconstrained => legendre_transform(&sys.without_constraint(), &[]),
            Regime::SpecialQ(q) => {
                check_special_q(sys, q)?;
                legendre_transform(sys, &[])
            }
            Regime::General => {
                if sys.constraint.is_none() {
                    return Err(Error::param("regime", "general regime needs an integral constraint"));
                }
                legendre_transform(sys, mu)
            }
        }
    }
}

fn check_special_q(sys: &QuadraticLagrangianSystem, q: &Matrix) -> Result<()> {
    let (b, _) = sys
        .constraint
        .as_ref()
        .ok_or_else(|| Error::param("regime", "special-Q regime needs an integral constraint"))?;
    if q.cols() != sys.a.rows() || q.rows() != b.rows() {
        return Err(Error::dim(format!("Q must be {}x{}", b.rows(), sys.a.rows())));
    }
    let gap = (&(q * &sys.a) - b).max_abs();
    if gap > 1e-12 * b.max_abs().max(1.0) {
        return Err(Error::param("regime", format!("B differs from QA by {gap:e}")));
    }
    Ok(())
}

/// Costate samples on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostateTrajectory {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl CostateTrajectory {
    pub fn terminal(&self) -> &[f64] {
        self.values.last().expect("non-empty costate")
    }
}

/// `p = −w (+ Qᵀμ)` where `w` is the variational adjoint along `(x, u)`.
pub fn costate_from_lagrangian<S: ControlSystem>(
    sys: &S,
    x: &OdeGrid,
    u: &ControlTrajectory,
    mu: &[f64],
    regime: &Regime,
) -> Result<CostateTrajectory> {
    let l = sys.constraint().dim();
    match regime {
        Regime::Unconstrained if !mu.is_empty() => {
            return Err(Error::param("mu", "unconstrained regime takes no multipliers"))
        }
        Regime::SpecialQ(_) | Regime::General if mu.len() != l || l == 0 => {
            return Err(Error::dim(format!("regime needs {l} multipliers, got {}", mu.len())))
        }
        _ => {}
    }
    let adjoint_mu = if matches!(regime, Regime::General) { mu } else { &[] };
    let w = adjoint(sys, x, u, adjoint_mu)?;
    let shift = regime.terminal_costate(sys.state_dim(), mu)?;
    let values = w
        .iter()
        .map(|wi| wi.iter().zip(&shift).map(|(a, s)| s - a).collect())
        .collect();
    Ok(CostateTrajectory { times: u.times.clone(), values })
}

/// Matched solution of a canonical two-point problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalSolution {
    pub x: OdeGrid,
    pub p: CostateTrajectory,
    /// `u = φ(x, p)` at each node.
    pub u: Vec<Vec<f64>>,
    /// `H(x, p)` at each node.
    pub h: Vec<f64>,
    pub mu: Vec<f64>,
    pub iterations: usize,
    pub terminal_defect: f64,
    /// `∫ (B u + α) dt` when the problem is constrained.
    pub constraint_residual: Vec<f64>,
}

impl CanonicalSolution {
    pub fn controls(&self) -> Result<ControlTrajectory> {
        ControlTrajectory::new(self.x.times.clone(), self.u.clone())
    }
}

fn shoot(ham: &HamiltonianSpec, x0: &[f64], p0: &[f64], times: &[f64]) -> Result<Vec<Vec<f64>>> {
    let mut z0 = x0.to_vec();
    z0.extend_from_slice(p0);
    rk4_on_times(&|_, z: &[f64]| ham.canonical_field(z), &z0, times)
}

fn terminal_defect(ham: &HamiltonianSpec, x0: &[f64], p0: &[f64], times: &[f64], target: &[f64]) -> Result<Vec<f64>> {
    let n = ham.state_dim;
    let z = shoot(ham, x0, p0, times)?;
    Ok(z.last().expect("nodes")[n..].iter().zip(target).map(|(a, b)| a - b).collect())
}

/// Damped Newton iteration on `F(v) = 0` with a finite-difference Jacobian.
/// `step` gives the difference increment for the current iterate.
fn newton<F>(mut v: Vec<f64>, f: F, step: impl Fn(&[f64]) -> f64, tol: impl Fn(&[f64]) -> f64) -> Result<(Vec<f64>, usize, f64)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let k = v.len();
    let mut fv = f(&v)?;
    let mut norm = norm_inf(&fv);
    for it in 0..MAX_NEWTON {
        if norm <= tol(&v) {
            return Ok((v, it, norm));
        }
        let delta = step(&v);
        let mut jac = Matrix::zeros(fv.len(), k);
        for j in 0..k {
            let mut probe = v.clone();
            probe[j] += delta;
            let fp = f(&probe)?;
            for i in 0..fv.len() {
                jac[(i, j)] = (fp[i] - fv[i]) / delta;
            }
        }
        let dir = jac.solve(&fv.iter().map(|x| -x).collect::<Vec<_>>())?;
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = v.iter().zip(&dir).map(|(a, d)| a + lambda * d).collect();
            if let Ok(ft) = f(&trial) {
                let nt = norm_inf(&ft);
                if nt < norm {
                    v = trial;
                    fv = ft;
                    norm = nt;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                return Err(Error::NonConvergence { iterations: it + 1, defect: norm });
            }
        }
    }
    if norm <= tol(&v) {
        Ok((v, MAX_NEWTON, norm))
    } else {
        Err(Error::NonConvergence { iterations: MAX_NEWTON, defect: norm })
    }
}

/// Solves `x' = ∇ₚH`, `p' = −∇ₓH`, `x(t0) = x0`, `p(t1) = terminal_p` by
/// shooting on `p(t0)`.
pub fn integrate_canonical(
    ham: &HamiltonianSpec,
    x0: &[f64],
    terminal_p: &[f64],
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<CanonicalSolution> {
    let n = ham.state_dim;
    if x0.len() != n || terminal_p.len() != n {
        return Err(Error::dim(format!("x0 and terminal_p must have length {n}")));
    }
    if steps < 4 {
        return Err(Error::param("steps", "need at least 4 steps"));
    }
    if !(t1 > t0) {
        return Err(Error::param("t1", "must exceed t0"));
    }
    let times = uniform_times(t0, t1, steps);
    let target_scale = norm_inf(terminal_p).max(1.0);
    let linear = ham.linear;
    let (p0, iterations, defect) = newton(
        terminal_p.to_vec(),
        |p0| terminal_defect(ham, x0, p0, &times, terminal_p),
        |p0| if linear { 1.0 } else { 1e-7 * norm_inf(p0).max(1.0) },
        |p0| SHOOTING_TOL * target_scale.max(norm_inf(p0)),
    )?;
    let z = shoot(ham, x0, &p0, &times)?;
    let xs: Vec<Vec<f64>> = z.iter().map(|s| s[..n].to_vec()).collect();
    let ps: Vec<Vec<f64>> = z.iter().map(|s| s[n..].to_vec()).collect();
    let u = xs.iter().zip(&ps).map(|(x, p)| ham.phi(x, p)).collect();
    let h = xs.iter().zip(&ps).map(|(x, p)| ham.value(x, p)).collect();
    Ok(CanonicalSolution {
        x: OdeGrid::new(times.clone(), xs)?,
        p: CostateTrajectory { times, values: ps },
        u,
        h,
        mu: ham.mu.clone(),
        iterations,
        terminal_defect: defect,
        constraint_residual: Vec::new(),
    })
}

/// `∫ (B u + α) dt` by Simpson's rule on the solution grid.
fn integral_constraint(b: &Matrix, alpha: &[f64], sol: &CanonicalSolution) -> Vec<f64> {
    let h = sol.x.times[1] - sol.x.times[0];
    (0..b.rows())
        .map(|r| {
            let vals: Vec<f64> = sol
                .u
                .iter()
                .map(|u| b.row(r).iter().zip(u).map(|(a, c)| a * c).sum::<f64>() + alpha[r])
                .collect();
            simpson_uniform(h, &vals)
        })
        .collect()
}

/// Solves the canonical problem of `regime`, finding `μ` by Newton on the
/// integral constraint when the system is constrained. `steps` is rounded up
/// to an even count.
pub fn solve_canonical(
    sys: &QuadraticLagrangianSystem,
    x0: &[f64],
    regime: &Regime,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<CanonicalSolution> {
    let steps = steps + steps % 2;
    let n = sys.state_dim();
    let run = |mu: &[f64]| -> Result<CanonicalSolution> {
        let ham = regime.hamiltonian(sys, mu)?;
        let terminal = regime.terminal_costate(n, mu)?;
        let mut sol = integrate_canonical(&ham, x0, &terminal, t0, t1, steps)?;
        sol.mu = mu.to_vec();
        Ok(sol)
    };
    let (b, alpha) = match (regime, &sys.constraint) {
        (Regime::Unconstrained, _) => return run(&[]),
        (_, Some((b, alpha))) => (b, alpha),
        (_, None) => return Err(Error::param("regime", "constrained regime needs an integral constraint")),
    };
    let scale = (norm_inf(alpha) * (t1 - t0)).max(1.0);
    let linear = sys.potential.is_quadratic();
    let (mu, _, _) = newton(
        vec![0.0; b.rows()],
        |mu| run(mu).map(|s| integral_constraint(b, alpha, &s)),
        |mu| if linear { 1.0 } else { 1e-6 * norm_inf(mu).max(1.0) },
        |_| MULTIPLIER_TOL * scale,
    )?;
    let mut sol = run(&mu)?;
    sol.constraint_residual = integral_constraint(b, alpha, &sol);
    Ok(sol)
}

/// `max_t |H(x(t), p(t)) − H(x(t0), p(t0))|`.
pub fn energy_drift(ham: &HamiltonianSpec, x: &OdeGrid, p: &CostateTrajectory) -> f64 {
    let h0 = ham.value(&x.states[0], &p.values[0]);
    x.states
        .iter()
        .zip(&p.values)
        .map(|(xi, pi)| (ham.value(xi, pi) - h0).abs())
        .fold(0.0, f64::max)
}
