use super::system::ControlSystem;
use super::trajectory::{ControlTrajectory, StateInterpolant};
use crate::numerics::quadrature::trapezoid_vec;
use crate::numerics::{dot, sym_eig, Matrix, OdeGrid};
use crate::{tolerances, Error, Result};

/// Three-point Gauss–Legendre nodes and weights on `[0, 1]`.
const GAUSS: [(f64, f64); 3] = [
    (0.112_701_665_379_258_3, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

/// `∫ F(t) dt` over the control grid, where `F` is evaluated at fraction `s`
/// of interval `i`. Piecewise-linear controls are integrated exactly.
fn integrate_intervals(times: &[f64], dim: usize, mut f: impl FnMut(usize, f64) -> Vec<f64>) -> Vec<f64> {
    let mut acc = vec![0.0; dim];
    for i in 0..times.len() - 1 {
        let h = times[i + 1] - times[i];
        for (s, w) in GAUSS {
            let v = f(i, s);
            acc.iter_mut().zip(&v).for_each(|(a, b)| *a += h * w * b);
        }
    }
    acc
}

fn lerp(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
}

fn control_within(u: &ControlTrajectory, i: usize, s: f64) -> Vec<f64> {
    lerp(&u.values[i], &u.values[i + 1], s)
}


fn rk4_interval(y: &[f64], h: f64, reverse: bool, mut field: impl FnMut(usize, &[f64]) -> Vec<f64>) -> Vec<f64> {
    // stage index 0, 1, 2 = start, middle, end of the interval; walking the interval forwards or backwards
    let (first, mid, last) = if reverse { (2, 1, 0) } else { (0, 1, 2) };
    let shifted = |k: &[f64], c: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + c * b).collect() };
    let k1 = field(first, y);
    let k2 = field(mid, &shifted(&k1, 0.5 * h));
    let k3 = field(mid, &shifted(&k2, 0.5 * h));
    let k4 = field(last, &shifted(&k3, h));
    (0..y.len())
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

fn check_finite(v: &[f64], time: f64) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergence { time })
    }
}

fn check_control<S: ControlSystem>(sys: &S, u: &ControlTrajectory) -> Result<()> {
    if u.dim() != sys.control_dim() {
        return Err(Error::dim(format!(
            "control has dimension {} but the system expects {}",
            u.dim(),
            sys.control_dim()
        )));
    }
    Ok(())
}

/// `x(·; u)` on the control grid, one RK4 step per interval.
pub fn simulate_state<S: ControlSystem>(sys: &S, u: &ControlTrajectory, x0: &[f64]) -> Result<OdeGrid> {
    check_control(sys, u)?;
    if x0.len() != sys.state_dim() {
        return Err(Error::dim(format!("x0 has length {} but the state dimension is {}", x0.len(), sys.state_dim())));
    }
    check_finite(x0, u.t0())?;
    let mut states = Vec::with_capacity(u.len());
    states.push(x0.to_vec());
    for i in 0..u.len() - 1 {
        let controls = [u.values[i].clone(), u.midpoint(i), u.values[i + 1].clone()];
        let h = u.times[i + 1] - u.times[i];
        let next = rk4_interval(&states[i], h, false, |s, x| sys.f(x, &controls[s]));
        check_finite(&next, u.times[i + 1])?;
        states.push(next);
    }
    OdeGrid::new(u.times.clone(), states)
}

fn interpolant<'a, S: ControlSystem>(sys: &S, x: &'a OdeGrid, u: &ControlTrajectory) -> Result<StateInterpolant<'a>> {
    if x.len() != u.len() || !u.times.iter().zip(&x.times).all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0)) {
        return Err(Error::param("x", "state and control grids differ"));
    }
    let derivs = x.states.iter().zip(&u.values).map(|(xi, ui)| sys.f(xi, ui)).collect();
    Ok(StateInterpolant { grid: x, derivs })
}

/// Stage states and controls for interval `i`.
fn stage_points(interp: &StateInterpolant, u: &ControlTrajectory, i: usize) -> [(Vec<f64>, Vec<f64>); 3] {
    [
        (interp.grid.states[i].clone(), u.values[i].clone()),
        (interp.within(i, 0.5), u.midpoint(i)),
        (interp.grid.states[i + 1].clone(), u.values[i + 1].clone()),
    ]
}

/// Fundamental matrices `X(t_i)` of the variational equation, `X(t0) = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionOperator {
    pub times: Vec<f64>,
    pub fundamental: Vec<Matrix>,
}

impl TransitionOperator {
    /// `T(t_i, t_j) = X(t_i) X(t_j)⁻¹`.
    pub fn between(&self, i: usize, j: usize) -> Result<Matrix> {
        Ok(&self.fundamental[i] * &self.fundamental[j].inverse()?)
    }
}

pub fn transition_matrix<S: ControlSystem>(sys: &S, x: &OdeGrid, u: &ControlTrajectory) -> Result<TransitionOperator> {
    check_control(sys, u)?;
    let interp = interpolant(sys, x, u)?;
    let n = sys.state_dim();
    let mut current = Matrix::identity(n);
    let mut fundamental = vec![current.clone()];
    for i in 0..u.len() - 1 {
        let jac = stage_points(&interp, u, i).map(|(xs, us)| sys.f_x(&xs, &us));
        let h = u.times[i + 1] - u.times[i];
        let next = rk4_interval(current.as_slice(), h, false, |s, flat| {
            let xm = Matrix::from_row_major(n, n, flat.to_vec()).unwrap_or_else(|_| Matrix::zeros(n, n));
            (&jac[s] * &xm).as_slice().to_vec()
        });
        check_finite(&next, u.times[i + 1])?;
        current = Matrix::from_row_major(n, n, next)?;
        current.lu().map_err(|_| Error::Singular)?;
        fundamental.push(current.clone());
    }
    Ok(TransitionOperator { times: u.times.clone(), fundamental })
}

fn check_mu<S: ControlSystem>(sys: &S, mu: &[f64]) -> Result<()> {
    let l = sys.constraint().dim();
    if !mu.is_empty() && mu.len() != l {
        return Err(Error::dim(format!("mu has length {} but the constraint dimension is {l}", mu.len())));
    }
    Ok(())
}

/// `w(t_i)` with `w' = −(∂f/∂x)ᵀw − (∂L/∂x − μᵀ∂g/∂x)ᵀ`, `w(t1) = 0`, so that
/// `w(t)ᵀ = ∫_t^{t1} (∂L/∂x − μᵀ∂g/∂x)(s) T(s, t) ds`. An empty `mu` drops
/// the constraint term.
pub fn adjoint<S: ControlSystem>(sys: &S, x: &OdeGrid, u: &ControlTrajectory, mu: &[f64]) -> Result<Vec<Vec<f64>>> {
    check_control(sys, u)?;
    check_mu(sys, mu)?;
    let interp = interpolant(sys, x, u)?;
    let constraint = sys.constraint();
    let n = sys.state_dim();
    let mut out = vec![vec![0.0; n]; u.len()];
    for i in (0..u.len() - 1).rev() {
        let stages = stage_points(&interp, u, i).map(|(xs, us)| {
            let fx_t = sys.f_x(&xs, &us).transpose();
            let mut source = sys.l_x(&xs, &us);
            if !mu.is_empty() {
                let gx = constraint.g_x(&xs, &us);
                let corr = gx.vec_mul(mu);
                source.iter_mut().zip(&corr).for_each(|(s, c)| *s -= c);
            }
            (fx_t, source)
        });
        let h = u.times[i] - u.times[i + 1];
        let prev = rk4_interval(&out[i + 1], h, true, |s, w| {
            let (fx_t, source) = &stages[s];
            fx_t.mul_vec(w).iter().zip(source).map(|(a, b)| -a - b).collect()
        });
        check_finite(&prev, u.times[i])?;
        out[i] = prev;
    }
    Ok(out)
}

/// `∂L/∂u − μᵀ∂g/∂u + w(t)ᵀ ∂f/∂u` at each node, where `w` carries the
/// adjoint integral. Zero along a critical point.
fn residual_nodes<S: ControlSystem>(
    sys: &S,
    x: &OdeGrid,
    u: &ControlTrajectory,
    w: &[Vec<f64>],
    mu: &[f64],
) -> Vec<Vec<f64>> {
    let constraint = sys.constraint();
    x.states
        .iter()
        .zip(&u.values)
        .zip(w)
        .map(|((xi, ui), wi)| {
            let mut r = sys.l_u(xi, ui);
            let adj = sys.f_u(xi, ui).vec_mul(wi);
            r.iter_mut().zip(&adj).for_each(|(a, b)| *a += b);
            if !mu.is_empty() {
                let gu = constraint.g_u(xi, ui).vec_mul(mu);
                r.iter_mut().zip(&gu).for_each(|(a, b)| *a -= b);
            }
            r
        })
        .collect()
}

/// Generalized Euler–Lagrange residual along `u`. `mu` must be empty for
/// unconstrained systems and have the constraint dimension otherwise.
pub fn el_residual<S: ControlSystem>(sys: &S, u: &ControlTrajectory, x0: &[f64], mu: &[f64]) -> Result<OdeGrid> {
    let l = sys.constraint().dim();
    if mu.len() != l {
        return Err(Error::dim(format!("mu has length {} but the constraint dimension is {l}", mu.len())));
    }
    let x = simulate_state(sys, u, x0)?;
    let w = adjoint(sys, &x, u, mu)?;
    OdeGrid::new(u.times.clone(), residual_nodes(sys, &x, u, &w, mu))
}

/// `δJ(u; h)` by the adjoint representation. State and adjoint are
/// Hermite-interpolated inside each interval and integrated by Gauss–Legendre.
pub fn first_variation<S: ControlSystem>(
    sys: &S,
    u: &ControlTrajectory,
    x0: &[f64],
    h: &ControlTrajectory,
) -> Result<f64> {
    if !u.same_grid(h) || h.dim() != u.dim() {
        return Err(Error::param("h", "variation must share the control grid and dimension"));
    }
    let x = simulate_state(sys, u, x0)?;
    let interp = interpolant(sys, &x, u)?;
    let w = OdeGrid::new(u.times.clone(), adjoint(sys, &x, u, &[])?)?;
    let w_derivs = x
        .states
        .iter()
        .zip(&u.values)
        .zip(&w.states)
        .map(|((xi, ui), wi)| {
            let fx = sys.f_x(xi, ui).vec_mul(wi);
            let lx = sys.l_x(xi, ui);
            fx.iter().zip(&lx).map(|(a, b)| -a - b).collect()
        })
        .collect();
    let w_interp = StateInterpolant { grid: &w, derivs: w_derivs };
    let total = integrate_intervals(&u.times, 1, |i, s| {
        let (xs, us, ws) = (interp.within(i, s), control_within(u, i, s), w_interp.within(i, s));
        let mut g = sys.l_u(&xs, &us);
        let adj = sys.f_u(&xs, &us).vec_mul(&ws);
        g.iter_mut().zip(&adj).for_each(|(a, b)| *a += b);
        vec![dot(&g, &control_within(h, i, s))]
    });
    Ok(total[0])
}

/// `J(u) = ∫ L(x, u) dt` with the state Hermite-interpolated inside each
/// interval and Gauss–Legendre quadrature.
pub fn evaluate_action<S: ControlSystem>(sys: &S, u: &ControlTrajectory, x0: &[f64]) -> Result<f64> {
    let x = simulate_state(sys, u, x0)?;
    let interp = interpolant(sys, &x, u)?;
    let total = integrate_intervals(&u.times, 1, |i, s| {
        vec![sys.lagrangian(&interp.within(i, s), &control_within(u, i, s))]
    });
    Ok(total[0])
}

/// `∫ g(x, u) dt` (or `∫ (B u + α) dt`), integrated like the action.
pub fn constraint_residual<S: ControlSystem>(sys: &S, u: &ControlTrajectory, x0: &[f64]) -> Result<Vec<f64>> {
    let constraint = sys.constraint();
    if constraint.dim() == 0 {
        return Err(Error::param("constraint", "system has no integral constraint"));
    }
    let x = simulate_state(sys, u, x0)?;
    let interp = interpolant(sys, &x, u)?;
    Ok(integrate_intervals(&u.times, constraint.dim(), |i, s| {
        constraint.g(&interp.within(i, s), &control_within(u, i, s))
    }))
}

/// Removes from `h` the constant `B⁺B·(∫h dt)/T`, so that
/// `∫ B h_proj dt = 0`.
pub fn project_allowed_variation(b: &Matrix, h: &ControlTrajectory) -> Result<ControlTrajectory> {
    if b.cols() != h.dim() {
        return Err(Error::dim(format!("B has {} columns but h has dimension {}", b.cols(), h.dim())));
    }
    let span = h.t1() - h.t0();
    let mean: Vec<f64> = trapezoid_vec(&h.times, &h.values).iter().map(|v| v / span).collect();
    let eig = sym_eig(&(&b.transpose() * b))?;
    let largest = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let cutoff = (tolerances::RANK * largest.sqrt()).powi(2);
    let projector = eig.map_values(|v| if v > cutoff && v > 0.0 { 1.0 } else { 0.0 });
    let shift = projector.mul_vec(&mean);
    Ok(ControlTrajectory {
        times: h.times.clone(),
        values: h.values.iter().map(|v| crate::numerics::sub(v, &shift)).collect(),
    })
}
