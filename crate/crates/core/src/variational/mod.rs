//! First-order machinery for `J(u) = ∫ L(x, u) dt` subject to `x' = f(x, u)`,
//! `x(t0) = x0`, and optionally `∫ (B u + α) dt = 0` or `∫ g(x, u) dt = 0`.
//!
//! The adjoint integral `∫_t^{t1} (∂L/∂x − μᵀ∂g/∂x)(s) T(s, t) ds` is
//! computed as `w(t)ᵀ` where `w' = −(∂f/∂x)ᵀ w − (∂L/∂x − μᵀ∂g/∂x)ᵀ`,
//! `w(t1) = 0`.

mod engine;
mod system;
mod trajectory;

pub use engine::{
    adjoint, constraint_residual, el_residual, evaluate_action, first_variation, project_allowed_variation,
    simulate_state, transition_matrix, TransitionOperator,
};
pub use system::{Constrained, Constraint, ControlSystem, IntegralConstraint};
pub use trajectory::{ControlTrajectory, StateInterpolant};
