//! Small dense linear algebra, fixed-step integration, quadrature and root
//! finding shared by the rest of the crate.

mod eigen;
mod matrix;
mod ode;
pub mod quadrature;
mod roots;

pub use eigen::{classify_values, definiteness, rank, sqrt_spd, sym_eig, Definiteness, EigenDecomposition};
pub use matrix::{add, axpy, dot, norm2, norm_inf, sub, Lu, Matrix};
pub use ode::{integrate_ode, rk4_on_times, rk4_step, uniform_times, OdeGrid};
pub use roots::find_root;
