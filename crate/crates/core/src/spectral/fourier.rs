//! Truncated Fourier representation of the loop currents and the
//! quadratic / linear / constant split of the action.
//!
//! A current is `i_k(t) = λ_k/T + Σ_n a_{k,n} cos(ω_n τ) + b_{k,n} sin(ω_n τ)`
//! with `τ = t − t0` and `ω_n = 2nπ/T`. Every oscillating mode has zero mean,
//! so `∫ i_k dt = λ_k` holds for any coefficients.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circuit::CircuitParams;
use crate::numerics::{quadrature::simpson_uniform, rk4_on_times, uniform_times};
use crate::{Error, Result};

/// Channel order throughout: `i3`, `i5`, `i6`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierCurrents {
    pub t0: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub lambda: [f64; 3],
    pub a: [Vec<f64>; 3],
    pub b: [Vec<f64>; 3],
}

impl FourierCurrents {
    /// All coefficients zero: constant currents `λ_k/T`.
    pub fn mean_only(t0: f64, horizon: f64, lambda: [f64; 3], ntrunc: usize) -> Self {
        let z = || vec![0.0; ntrunc];
        Self {
            t0,
            horizon,
            lambda,
            a: [z(), z(), z()],
            b: [z(), z(), z()],
        }
    }

    pub fn for_params(params: &CircuitParams, ntrunc: usize) -> Self {
        Self::mean_only(params.t0, params.horizon(), params.lambda(), ntrunc)
    }

    pub fn ntrunc(&self) -> usize {
        self.a[0].len()
    }

    pub fn t1(&self) -> f64 {
        self.t0 + self.horizon
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.ntrunc();
        if self.a.iter().chain(&self.b).any(|c| c.len() != n) {
            return Err(Error::dim("all coefficient arrays must share one truncation order"));
        }
        if !(self.horizon > 0.0) || !self.t0.is_finite() || !self.horizon.is_finite() {
            return Err(Error::param("T", "horizon must be positive and finite"));
        }
        let finite = self
            .a
            .iter()
            .chain(&self.b)
            .flatten()
            .chain(&self.lambda)
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::param("coefficients", "must be finite"));
        }
        Ok(())
    }

    /// Squared L² norm of the oscillating coefficients.
    pub fn coefficient_norm_sq(&self) -> f64 {
        self.a.iter().chain(&self.b).flatten().map(|v| v * v).sum()
    }

    /// Means kept, oscillating coefficients multiplied by `h`.
    pub fn scaled_modes(&self, h: f64) -> Self {
        let s = |c: &[Vec<f64>; 3]| c.clone().map(|v| v.into_iter().map(|x| h * x).collect());
        Self {
            a: s(&self.a),
            b: s(&self.b),
            ..self.clone()
        }
    }

    /// Same horizon and means, oscillating coefficients `self + h·dir`.
    pub fn along(&self, dir: &FourierCurrents, h: f64) -> Result<Self> {
        if dir.ntrunc() != self.ntrunc() {
            return Err(Error::dim("direction truncation differs from base"));
        }
        let comb = |x: &[Vec<f64>; 3], y: &[Vec<f64>; 3]| {
            std::array::from_fn(|k| x[k].iter().zip(&y[k]).map(|(p, q)| p + h * q).collect())
        };
        Ok(Self {
            a: comb(&self.a, &dir.a),
            b: comb(&self.b, &dir.b),
            ..self.clone()
        })
    }

    fn omega(&self, n: usize) -> f64 {
        2.0 * PI * n as f64 / self.horizon
    }

    /// Currents at `τ = t − t0`, without a domain check.
    pub fn currents_at_offset(&self, tau: f64) -> [f64; 3] {
        let mut out = self.lambda.map(|l| l / self.horizon);
        for n in 1..=self.ntrunc() {
            let (s, c) = (self.omega(n) * tau).sin_cos();
            for k in 0..3 {
                out[k] += self.a[k][n - 1] * c + self.b[k][n - 1] * s;
            }
        }
        out
    }

    /// Cumulative loop charges `∫_{t0}^{t} i_k`, in closed form.
    pub fn charges_at_offset(&self, tau: f64) -> [f64; 3] {
        let mut out = self.lambda.map(|l| l * tau / self.horizon);
        for n in 1..=self.ntrunc() {
            let w = self.omega(n);
            let (s, c) = (w * tau).sin_cos();
            for k in 0..3 {
                out[k] += (self.a[k][n - 1] * s + self.b[k][n - 1] * (1.0 - c)) / w;
            }
        }
        out
    }
}

/// `(i3, i5, i6)` at time `t`.
pub fn sample_currents(currents: &FourierCurrents, t: f64) -> Result<[f64; 3]> {
    let t1 = currents.t1();
    let slack = 1e-12 * currents.horizon;
    if !(t >= currents.t0 - slack && t <= t1 + slack) {
        return Err(Error::Domain { t, t0: currents.t0, t1 });
    }
    Ok(currents.currents_at_offset(t - currents.t0))
}

/// The action split as `J = Q + L + N`, with `Q = Q1 + Q2` for the cosine
/// and sine blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalBreakdown {
    pub quadratic_cos: f64,
    pub quadratic_sin: f64,
    pub quadratic: f64,
    pub linear: f64,
    pub constant: f64,
    pub total: f64,
}

impl FunctionalBreakdown {
    /// Sum of the magnitudes of the parts; the natural scale for relative
    /// comparisons when the parts cancel.
    pub fn magnitude(&self) -> f64 {
        self.quadratic_cos.abs() + self.quadratic_sin.abs() + self.linear.abs() + self.constant.abs()
    }
}

fn check_horizon(params: &CircuitParams, currents: &FourierCurrents) -> Result<()> {
    params.validate()?;
    currents.validate()?;
    let tol = 1e-12 * params.horizon().abs().max(1.0);
    if (currents.horizon - params.horizon()).abs() > tol || (currents.t0 - params.t0).abs() > tol {
        return Err(Error::param(
            "T",
            format!(
                "currents span [{}, {}] but the circuit horizon is [{}, {}]",
                currents.t0,
                currents.t1(),
                params.t0,
                params.t1
            ),
        ));
    }
    Ok(())
}

/// Series evaluation of the action for truncated currents.
pub fn evaluate_functional(params: &CircuitParams, currents: &FourierCurrents) -> Result<FunctionalBreakdown> {
    check_horizon(params, currents)?;
    let t = params.horizon();
    let (l3, l4, l5, l6) = (params.l3, params.l4, params.l5, params.l6);
    let (c1, c2) = (params.c1, params.c2);
    let [lam3, lam5, lam6] = currents.lambda;
    let (q10, q20) = (params.q1_0, params.q2_0);
    let pi2 = PI * PI;

    let block = |c: &[Vec<f64>; 3]| {
        let mut kinetic = 0.0;
        let mut cap1 = 0.0;
        let mut cap2 = 0.0;
        let mut first1 = 0.0;
        let mut first2 = 0.0;
        for i in 0..c[0].len() {
            let n = (i + 1) as f64;
            let (x3, x5, x6) = (c[0][i], c[1][i], c[2][i]);
            let d = x3 - x5 - x6;
            kinetic += l4 * d * d + l3 * x3 * x3 + l5 * x5 * x5 + l6 * x6 * x6;
            cap1 += (x3 / n).powi(2);
            cap2 += ((x5 + x6) / n).powi(2);
            first1 += x3 / n;
            first2 += (x5 + x6) / n;
        }
        (kinetic, cap1, cap2, first1, first2)
    };

    let (kin_a, cap1_a, cap2_a, _, _) = block(&currents.a);
    let (kin_b, cap1_b, cap2_b, sum_b3, sum_b56) = block(&currents.b);
    let cap_scale = t.powi(3) / (16.0 * pi2);
    let quadratic_cos = 0.25 * t * kin_a - cap_scale * (cap1_a / c1 + cap2_a / c2);
    let quadratic_sin = 0.25 * t * kin_b
        - cap_scale * (cap1_b / c1 + cap2_b / c2)
        - 2.0 * cap_scale * (sum_b3 * sum_b3 / c1 + sum_b56 * sum_b56 / c2);

    let a_over_n2 = |k: usize| -> f64 {
        currents.a[k]
            .iter()
            .enumerate()
            .map(|(i, x)| x / ((i + 1) as f64).powi(2))
            .sum()
    };
    let lin_scale = t * t / (4.0 * PI);
    let linear = -lin_scale * ((2.0 * q10 + lam3) * sum_b3 / c1 + (2.0 * q20 + lam5 + lam6) * sum_b56 / c2)
        + lin_scale / PI * (lam3 * a_over_n2(0) / c1 + (lam5 + lam6) * (a_over_n2(1) + a_over_n2(2)) / c2);

    let lam56 = lam5 + lam6;
    let d = lam3 - lam5 - lam6;
    let constant = (l3 * lam3 * lam3 + l5 * lam5 * lam5 + l6 * lam6 * lam6 + l4 * d * d) / (2.0 * t)
        - t / (6.0 * c1) * (3.0 * q10 * q10 + 3.0 * q10 * lam3 + lam3 * lam3)
        - t / (6.0 * c2) * (3.0 * q20 * q20 + 3.0 * q20 * lam56 + lam56 * lam56);

    let quadratic = quadratic_cos + quadratic_sin;
    Ok(FunctionalBreakdown {
        quadratic_cos,
        quadratic_sin,
        quadratic,
        linear,
        constant,
        total: quadratic + linear + constant,
    })
}

/// Direct quadrature of the action: charges from RK4 on `q' = (i3, i5 + i6)`,
/// integrand by composite Simpson. `quad_steps` is raised to at least 64 and
/// rounded up to an even count.
pub fn evaluate_functional_time_domain(
    params: &CircuitParams,
    currents: &FourierCurrents,
    quad_steps: usize,
) -> Result<f64> {
    check_horizon(params, currents)?;
    let steps = quad_steps.max(64).next_multiple_of(2);
    let times = uniform_times(0.0, params.horizon(), steps);
    let field = |tau: f64, _: &[f64]| {
        let i = currents.currents_at_offset(tau);
        vec![i[0], i[1] + i[2]]
    };
    let charges = rk4_on_times(&field, &[params.q1_0, params.q2_0], &times)?;
    let m = params.inductance_matrix();
    let integrand: Vec<f64> = times
        .iter()
        .zip(&charges)
        .map(|(&tau, q)| {
            let i = currents.currents_at_offset(tau);
            0.5 * m.quadratic_form(&i) - q[0] * q[0] / (2.0 * params.c1) - q[1] * q[1] / (2.0 * params.c2)
        })
        .collect();
    Ok(simpson_uniform(params.horizon() / steps as f64, &integrand))
}
