use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::propagator::{propagators, PropagatorPair};
use crate::circuit::{build_matrices, CircuitParams};
use crate::numerics::{norm2, sub, sym_eig, uniform_times, Matrix, OdeGrid};
use crate::{tolerances, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResonantMode {
    /// 1 or 2: which of `h1`, `h2`.
    pub channel: usize,
    pub k: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub resonant: bool,
    /// Within the near-resonance band; the solve is ill-conditioned.
    pub near_resonant: bool,
    pub resonant_modes: Vec<ResonantMode>,
    pub solvable: bool,
    pub family_dimension: usize,
    /// `σ_max/σ_min` of `Φ(T)`; infinite when singular.
    pub condition_number: f64,
}

/// Critical-point trajectory. `grid` holds the loop charges `x = (x1, x2, x3)`
/// followed by the currents `x' = (i3, i5, i6)`, with `x(t0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BvpSolution {
    pub params: CircuitParams,
    /// Initial currents `x'(t0)`.
    pub c: [f64; 3],
    pub grid: OdeGrid,
    /// `(l3, l5, l6)`.
    pub stationarity_constants: [f64; 3],
    /// `max_k |x_k(t1) − λ_k|`.
    pub boundary_defect: f64,
    #[serde(skip)]
    propagators: Option<PropagatorPair>,
}

impl BvpSolution {
    pub fn times(&self) -> &[f64] {
        &self.grid.times
    }

    /// Capacitor charges `(q1, q2)` at every node.
    pub fn charges(&self) -> Vec<[f64; 2]> {
        self.grid.states.iter().map(|s| self.params.charges(&s[..3])).collect()
    }

    /// `(i3, i5, i6)` at every node.
    pub fn currents(&self) -> Vec<[f64; 3]> {
        self.grid.states.iter().map(|s| [s[3], s[4], s[5]]).collect()
    }

    /// Closed-form `(x(t), x'(t))` at any time of the horizon.
    pub fn evaluate(&self, t: f64) -> Result<([f64; 3], [f64; 3])> {
        let pair = match &self.propagators {
            Some(p) => p.clone(),
            None => propagators(&build_matrices(&self.params)?),
        };
        Ok(closed_form(&pair, &self.c, t - self.params.t0))
    }
}

fn to3(v: Vec<f64>) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

/// `x(τ) = Φ(τ)c + [∫₀^τ Φ] M⁻¹a` and its derivative `Ψ(τ)c + Φ(τ)M⁻¹a`.
fn closed_form(pair: &PropagatorPair, c: &[f64; 3], tau: f64) -> ([f64; 3], [f64; 3]) {
    let forcing = pair.matrices.m_inv.mul_vec(&pair.matrices.a);
    let x = crate::numerics::add(&pair.phi(tau).mul_vec(c), &pair.phi_integral(tau).mul_vec(&forcing));
    let v = crate::numerics::add(&pair.psi(tau).mul_vec(c), &pair.phi(tau).mul_vec(&forcing));
    (to3(x), to3(v))
}

/// Right-hand side `λ − [∫₀ᵀ Φ] M⁻¹a` of `Φ(T) c = rhs`.
pub fn boundary_rhs(params: &CircuitParams, pair: &PropagatorPair) -> [f64; 3] {
    let forcing = pair.matrices.m_inv.mul_vec(&pair.matrices.a);
    to3(sub(&params.lambda(), &pair.phi_integral(params.horizon()).mul_vec(&forcing)))
}

fn resonant_modes(params: &CircuitParams, pair: &PropagatorPair, band: f64) -> Vec<ResonantMode> {
    let t = params.horizon();
    [pair.matrices.h1, pair.matrices.h2]
        .iter()
        .enumerate()
        .filter_map(|(i, &h)| {
            let x = t * h.sqrt() / PI;
            let k = x.round();
            (k >= 1.0 && (x - k).abs() <= band * x.max(1.0)).then_some(ResonantMode { channel: i + 1, k: k as u64 })
        })
        .collect()
}

struct SingularData {
    sigma_max: f64,
    sigma_min: f64,
    /// Right singular vectors with non-negligible singular value, and σ².
    range: Vec<(Vec<f64>, f64)>,
    kernel: Vec<Vec<f64>>,
    cokernel: Vec<Vec<f64>>,
}

fn singular_data(phi: &Matrix) -> Result<SingularData> {
    let right = sym_eig(&(&phi.transpose() * phi))?;
    let left = sym_eig(&(phi * &phi.transpose()))?;
    let sigma_max = right.values.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    let sigma_min = right.values[0].max(0.0).sqrt();
    let cutoff = tolerances::KERNEL * sigma_max;
    let mut out = SingularData { sigma_max, sigma_min, range: vec![], kernel: vec![], cokernel: vec![] };
    for (k, &v) in right.values.iter().enumerate() {
        if v.max(0.0).sqrt() <= cutoff {
            out.kernel.push(right.vector(k));
        } else {
            out.range.push((right.vector(k), v));
        }
    }
    for (k, &v) in left.values.iter().enumerate() {
        if v.max(0.0).sqrt() <= cutoff {
            out.cokernel.push(left.vector(k));
        }
    }
    Ok(out)
}

fn condition(sd: &SingularData) -> f64 {
    if sd.sigma_min > 0.0 {
        sd.sigma_max / sd.sigma_min
    } else {
        f64::INFINITY
    }
}

/// Whether `Φ(T)c = rhs` is uniquely solvable, i.e. no `T√h_i` is a positive
/// multiple of `π`.
pub fn uniqueness_check(params: &CircuitParams) -> Result<ResonanceReport> {
    let pair = propagators(&build_matrices(params)?);
    Ok(analyse(params, &pair)?.0)
}

fn analyse(params: &CircuitParams, pair: &PropagatorPair) -> Result<(ResonanceReport, SingularData)> {
    let modes = resonant_modes(params, pair, tolerances::RESONANCE);
    let near = !resonant_modes(params, pair, tolerances::NEAR_RESONANCE).is_empty();
    let phi_t = pair.phi(params.horizon());
    let sd = singular_data(&phi_t)?;
    let resonant = !modes.is_empty();
    let (solvable, family_dimension) = if resonant {
        let rhs = boundary_rhs(params, pair);
        let leak: f64 = sd.cokernel.iter().map(|u| crate::numerics::dot(u, &rhs).powi(2)).sum::<f64>().sqrt();
        (leak <= 1e-8 * norm2(&rhs), sd.kernel.len())
    } else {
        (true, 0)
    };
    Ok((
        ResonanceReport {
            resonant,
            near_resonant: near,
            resonant_modes: modes,
            solvable,
            family_dimension,
            condition_number: condition(&sd),
        },
        sd,
    ))
}

fn build_solution(params: &CircuitParams, pair: PropagatorPair, c: [f64; 3], steps: usize) -> Result<BvpSolution> {
    if steps == 0 {
        return Err(Error::param("steps", "must be at least 1"));
    }
    let times = uniform_times(params.t0, params.t1, steps);
    let states = times
        .iter()
        .map(|&t| {
            let (x, v) = closed_form(&pair, &c, t - params.t0);
            vec![x[0], x[1], x[2], v[0], v[1], v[2]]
        })
        .collect();
    let (x_end, v_end) = closed_form(&pair, &c, params.horizon());
    let boundary_defect = crate::numerics::norm_inf(&sub(&x_end, &params.lambda()));
    // at t1 the capacitive tail integral vanishes, leaving l = M x'(t1)
    let constants = to3(pair.matrices.m.mul_vec(&v_end));
    Ok(BvpSolution {
        params: *params,
        c,
        grid: OdeGrid::new(times, states)?,
        stationarity_constants: constants,
        boundary_defect,
        propagators: Some(pair),
    })
}

/// Unique critical point of the constrained action, sampled on `steps + 1`
/// uniform nodes. Fails with [`Error::Resonant`] when `Φ(T)` is singular.
pub fn solve_critical_point(params: &CircuitParams, steps: usize) -> Result<BvpSolution> {
    let pair = propagators(&build_matrices(params)?);
    let modes = resonant_modes(params, &pair, tolerances::RESONANCE);
    if let Some(m) = modes.first() {
        return Err(Error::Resonant { channel: m.channel, k: m.k });
    }
    let rhs = boundary_rhs(params, &pair);
    let c = to3(pair.phi(params.horizon()).solve(&rhs)?);
    build_solution(params, pair, c, steps)
}

/// One particular critical point and the kernel of `Φ(T)` spanning the
/// whole family `c + Σ θ_j k_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalFamily {
    pub particular: BvpSolution,
    pub kernel: Vec<[f64; 3]>,
}

impl CriticalFamily {
    pub fn member(&self, theta: &[f64], steps: usize) -> Result<BvpSolution> {
        if theta.len() != self.kernel.len() {
            return Err(Error::dim(format!(
                "family has dimension {} but {} coordinates were given",
                self.kernel.len(),
                theta.len()
            )));
        }
        let mut c = self.particular.c;
        for (th, k) in theta.iter().zip(&self.kernel) {
            for i in 0..3 {
                c[i] += th * k[i];
            }
        }
        let pair = propagators(&build_matrices(&self.particular.params)?);
        build_solution(&self.particular.params, pair, c, steps)
    }
}

/// Resonance report plus, when the boundary problem is solvable, the
/// minimum-norm particular solution and the kernel basis.
pub fn resonance_analysis(params: &CircuitParams, steps: usize) -> Result<(ResonanceReport, Option<CriticalFamily>)> {
    let pair = propagators(&build_matrices(params)?);
    let (report, sd) = analyse(params, &pair)?;
    if !report.solvable {
        return Ok((report, None));
    }
    let phi_t = pair.phi(params.horizon());
    let rhs = boundary_rhs(params, &pair);
    let projected = phi_t.transpose().mul_vec(&rhs);
    let mut c = [0.0; 3];
    for (v, s2) in &sd.range {
        let w = crate::numerics::dot(v, &projected) / s2;
        for i in 0..3 {
            c[i] += w * v[i];
        }
    }
    let kernel = if report.resonant { sd.kernel.iter().map(|k| to3(k.clone())).collect() } else { vec![] };
    let particular = build_solution(params, pair, c, steps)?;
    Ok((report, Some(CriticalFamily { particular, kernel })))
}
