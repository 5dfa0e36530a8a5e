use std::fmt;
use std::sync::Arc;

use crate::numerics::Matrix;

/// Smooth integral constraint `∫ g(x, u) dt = 0` with `g: Rⁿ × Rᵐ → Rˡ`.
pub trait IntegralConstraint: Send + Sync {
    fn dim(&self) -> usize;
    fn g(&self, x: &[f64], u: &[f64]) -> Vec<f64>;
    /// `l × n`.
    fn g_x(&self, x: &[f64], u: &[f64]) -> Matrix;
    /// `l × m`.
    fn g_u(&self, x: &[f64], u: &[f64]) -> Matrix;
}

#[derive(Clone, Default)]
pub enum Constraint {
    #[default]
    None,
    /// `∫ (B u + α) dt = 0`.
    Linear { b: Matrix, alpha: Vec<f64> },
    General(Arc<dyn IntegralConstraint>),
}

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::None => write!(f, "None"),
            Constraint::Linear { b, alpha } => f.debug_struct("Linear").field("b", b).field("alpha", alpha).finish(),
            Constraint::General(g) => write!(f, "General(dim = {})", g.dim()),
        }
    }
}

impl Constraint {
    pub fn dim(&self) -> usize {
        match self {
            Constraint::None => 0,
            Constraint::Linear { b, .. } => b.rows(),
            Constraint::General(g) => g.dim(),
        }
    }

    pub fn g(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        match self {
            Constraint::None => vec![],
            Constraint::Linear { b, alpha } => crate::numerics::add(&b.mul_vec(u), alpha),
            Constraint::General(g) => g.g(x, u),
        }
    }

    pub fn g_x(&self, x: &[f64], u: &[f64]) -> Matrix {
        match self {
            Constraint::None => Matrix::zeros(0, x.len()),
            Constraint::Linear { b, .. } => Matrix::zeros(b.rows(), x.len()),
            Constraint::General(g) => g.g_x(x, u),
        }
    }

    pub fn g_u(&self, x: &[f64], u: &[f64]) -> Matrix {
        match self {
            Constraint::None => Matrix::zeros(0, u.len()),
            Constraint::Linear { b, .. } => b.clone(),
            Constraint::General(g) => g.g_u(x, u),
        }
    }
}

/// A control-affine or general Lagrange problem with first derivatives.
pub trait ControlSystem: Send + Sync {
    fn state_dim(&self) -> usize;
    fn control_dim(&self) -> usize;
    fn f(&self, x: &[f64], u: &[f64]) -> Vec<f64>;
    /// `n × n`.
    fn f_x(&self, x: &[f64], u: &[f64]) -> Matrix;
    /// `n × m`.
    fn f_u(&self, x: &[f64], u: &[f64]) -> Matrix;
    fn lagrangian(&self, x: &[f64], u: &[f64]) -> f64;
    fn l_x(&self, x: &[f64], u: &[f64]) -> Vec<f64>;
    fn l_u(&self, x: &[f64], u: &[f64]) -> Vec<f64>;

    fn constraint(&self) -> Constraint {
        Constraint::None
    }
}

/// Attaches an integral constraint to an unconstrained system.
#[derive(Debug, Clone)]
pub struct Constrained<S> {
    pub system: S,
    pub constraint: Constraint,
}

impl<S: ControlSystem> Constrained<S> {
    pub fn new(system: S, constraint: Constraint) -> Self {
        Self { system, constraint }
    }
}

impl<S: ControlSystem> ControlSystem for Constrained<S> {
    fn state_dim(&self) -> usize {
        self.system.state_dim()
    }
    fn control_dim(&self) -> usize {
        self.system.control_dim()
    }
    fn f(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        self.system.f(x, u)
    }
    fn f_x(&self, x: &[f64], u: &[f64]) -> Matrix {
        self.system.f_x(x, u)
    }
    fn f_u(&self, x: &[f64], u: &[f64]) -> Matrix {
        self.system.f_u(x, u)
    }
    fn lagrangian(&self, x: &[f64], u: &[f64]) -> f64 {
        self.system.lagrangian(x, u)
    }
    fn l_x(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        self.system.l_x(x, u)
    }
    fn l_u(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        self.system.l_u(x, u)
    }
    fn constraint(&self) -> Constraint {
        self.constraint.clone()
    }
}

impl<S: ControlSystem + ?Sized> ControlSystem for &S {
    fn state_dim(&self) -> usize {
        (**self).state_dim()
    }
    fn control_dim(&self) -> usize {
        (**self).control_dim()
    }
    fn f(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        (**self).f(x, u)
    }
    fn f_x(&self, x: &[f64], u: &[f64]) -> Matrix {
        (**self).f_x(x, u)
    }
    fn f_u(&self, x: &[f64], u: &[f64]) -> Matrix {
        (**self).f_u(x, u)
    }
    fn lagrangian(&self, x: &[f64], u: &[f64]) -> f64 {
        (**self).lagrangian(x, u)
    }
    fn l_x(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        (**self).l_x(x, u)
    }
    fn l_u(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        (**self).l_u(x, u)
    }
    fn constraint(&self) -> Constraint {
        (**self).constraint()
    }
}
