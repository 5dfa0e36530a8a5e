//! Variational analysis of LC circuits and control-affine Lagrange problems.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: small dense linear algebra, RK4 integration, bracketing root finder.
//! * [`circuit`]: the worked LC circuit and the matrices derived from it.
//! * [`spectral`]: Fourier representation of constrained currents, the
//!   quadratic/linear/constant split of the action, the series constants and
//!   the classification of the critical-point structure.
//! * [`critical`]: closed-form propagators and the critical-point boundary value problem.
//! * [`variational`]: the general engine (state simulation, transition matrices,
//!   first variation, generalized Euler–Lagrange residuals).
//! * [`hamiltonian`]: generalized Legendre transform, costates, canonical
//!   two-point problems and the Lagrangian/Hamiltonian equivalence checks.

pub mod circuit;
pub mod critical;
mod error;
pub mod hamiltonian;
pub mod numerics;
pub mod spectral;
pub mod tolerances;
pub mod variational;

pub use error::{Error, Result};

pub use circuit::{CircuitMatrices, CircuitParams, StabilityMatrices};
pub use numerics::{Definiteness, EigenDecomposition, Matrix, OdeGrid};
