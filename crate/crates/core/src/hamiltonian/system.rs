use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::circuit::CircuitParams;
use crate::numerics::{sqrt_spd, Matrix};
use crate::variational::{Constraint, ControlSystem};
use crate::{Error, Result};

/// Potential energy `V(x)` in `L = ½uᵀRu − V(x)`.
pub trait Potential: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    /// True when `∇V` is linear, which makes the canonical system linear.
    fn is_quadratic(&self) -> bool {
        false
    }
}

/// `V(x) = ½ xᵀ K x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticPotential {
    pub k: Matrix,
}

impl Potential for QuadraticPotential {
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.k.quadratic_form(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.k.symmetrized().mul_vec(x)
    }
    fn is_quadratic(&self) -> bool {
        true
    }
}

/// Pendulum-driven capacitor with `C(θ) = C0/(1 + κθ)`:
/// `V(q, θ) = q²(1 + κθ)/(2C0) − m g l cos θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectromechParams {
    #[serde(rename = "L1")]
    pub l1: f64,
    #[serde(rename = "L2")]
    pub l2: f64,
    pub mass: f64,
    pub length: f64,
    pub gravity: f64,
    #[serde(rename = "C0")]
    pub c0: f64,
    pub kappa: f64,
}

impl Default for ElectromechParams {
    fn default() -> Self {
        Self { l1: 1.0, l2: 2.0, mass: 0.5, length: 1.0, gravity: 9.81, c0: 1.0, kappa: 0.2 }
    }
}

impl ElectromechParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("L1", self.l1),
            ("L2", self.l2),
            ("mass", self.mass),
            ("length", self.length),
            ("C0", self.c0),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, "must be strictly positive"));
            }
        }
        if !self.gravity.is_finite() || !self.kappa.is_finite() {
            return Err(Error::param("gravity", "gravity and kappa must be finite"));
        }
        Ok(())
    }

    pub fn capacitance(&self, theta: f64) -> f64 {
        self.c0 / (1.0 + self.kappa * theta)
    }
}

impl Potential for ElectromechParams {
    fn value(&self, x: &[f64]) -> f64 {
        let (q, th) = (x[0], x[1]);
        q * q * (1.0 + self.kappa * th) / (2.0 * self.c0) - self.mass * self.gravity * self.length * th.cos()
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let (q, th) = (x[0], x[1]);
        vec![
            q * (1.0 + self.kappa * th) / self.c0,
            self.kappa * q * q / (2.0 * self.c0) + self.mass * self.gravity * self.length * th.sin(),
        ]
    }
}

/// `x' = A u`, `L = ½uᵀRu − V(x)`, optionally with `∫ (B u + α) dt = 0`.
#[derive(Clone)]
pub struct QuadraticLagrangianSystem {
    pub a: Matrix,
    pub r: Matrix,
    r_inv: Matrix,
    pub potential: Arc<dyn Potential>,
    /// `(B, α)`.
    pub constraint: Option<(Matrix, Vec<f64>)>,
}

impl fmt::Debug for QuadraticLagrangianSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadraticLagrangianSystem")
            .field("a", &self.a)
            .field("r", &self.r)
            .field("constraint", &self.constraint)
            .finish_non_exhaustive()
    }
}

impl QuadraticLagrangianSystem {
    /// Fails unless `R` is symmetric positive definite and shapes agree.
    pub fn new(a: Matrix, r: Matrix, potential: Arc<dyn Potential>) -> Result<Self> {
        if !r.is_square() || r.rows() != a.cols() {
            return Err(Error::dim(format!(
                "A is {}x{} so R must be {}x{}, got {}x{}",
                a.rows(),
                a.cols(),
                a.cols(),
                a.cols(),
                r.rows(),
                r.cols()
            )));
        }
        let (_, neg_half) = sqrt_spd(&r)?;
        let r_inv = (&neg_half * &neg_half).symmetrized();
        Ok(Self { a, r, r_inv, potential, constraint: None })
    }

    pub fn with_constraint(mut self, b: Matrix, alpha: Vec<f64>) -> Result<Self> {
        if b.cols() != self.a.cols() || alpha.len() != b.rows() {
            return Err(Error::dim("constraint B must have m columns and α one entry per row"));
        }
        self.constraint = Some((b, alpha));
        Ok(self)
    }

    pub fn without_constraint(&self) -> Self {
        Self { constraint: None, ..self.clone() }
    }

    pub fn r_inv(&self) -> &Matrix {
        &self.r_inv
    }

    pub fn constraint_dim(&self) -> usize {
        self.constraint.as_ref().map_or(0, |(b, _)| b.rows())
    }

    /// Free LC circuit: `x = (q1, q2)`, `u = (i3, i5, i6)`.
    pub fn lc_circuit(params: &CircuitParams) -> Result<Self> {
        params.validate()?;
        let a = Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 1.0]]);
        let k = Matrix::from_diagonal(&[1.0 / params.c1, 1.0 / params.c2]);
        Self::new(a, params.inductance_matrix(), Arc::new(QuadraticPotential { k }))
    }

    /// LC circuit with the three charge-transfer constraints `∫ i_k = λ_k`.
    pub fn lc_integral_constraints(params: &CircuitParams) -> Result<Self> {
        let t = params.horizon();
        let alpha = params.lambda().iter().map(|l| -l / t).collect();
        Self::lc_circuit(params)?.with_constraint(Matrix::identity(3), alpha)
    }

    /// LC circuit with prescribed terminal charges `(q1, q2)(t1)`.
    pub fn lc_terminal_charges(params: &CircuitParams, target: [f64; 2]) -> Result<Self> {
        let t = params.horizon();
        let alpha = vec![-(target[0] - params.q1_0) / t, -(target[1] - params.q2_0) / t];
        let sys = Self::lc_circuit(params)?;
        let b = sys.a.clone();
        sys.with_constraint(b, alpha)
    }

    /// `x = (q, θ)`, `u = (i1, i2, ω)`, `R = diag(L1, L2, m l²)`.
    pub fn electromechanical(p: &ElectromechParams) -> Result<Self> {
        p.validate()?;
        let a = Matrix::from_rows(&[[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let r = Matrix::from_diagonal(&[p.l1, p.l2, p.mass * p.length * p.length]);
        Self::new(a, r, Arc::new(*p))
    }

    /// `x' = u`, `L = ½u² − ½x²`.
    pub fn harmonic() -> Self {
        let k = Matrix::identity(1);
        Self::new(Matrix::identity(1), Matrix::identity(1), Arc::new(QuadraticPotential { k }))
            .expect("identity data is valid")
    }
}

impl ControlSystem for QuadraticLagrangianSystem {
    fn state_dim(&self) -> usize {
        self.a.rows()
    }
    fn control_dim(&self) -> usize {
        self.a.cols()
    }
    fn f(&self, _: &[f64], u: &[f64]) -> Vec<f64> {
        self.a.mul_vec(u)
    }
    fn f_x(&self, x: &[f64], _: &[f64]) -> Matrix {
        Matrix::zeros(x.len(), x.len())
    }
    fn f_u(&self, _: &[f64], _: &[f64]) -> Matrix {
        self.a.clone()
    }
    fn lagrangian(&self, x: &[f64], u: &[f64]) -> f64 {
        0.5 * self.r.quadratic_form(u) - self.potential.value(x)
    }
    fn l_x(&self, x: &[f64], _: &[f64]) -> Vec<f64> {
        self.potential.gradient(x).into_iter().map(|g| -g).collect()
    }
    fn l_u(&self, _: &[f64], u: &[f64]) -> Vec<f64> {
        self.r.mul_vec(u)
    }
    fn constraint(&self) -> Constraint {
        match &self.constraint {
            None => Constraint::None,
            Some((b, alpha)) => Constraint::Linear { b: b.clone(), alpha: alpha.clone() },
        }
    }
}
