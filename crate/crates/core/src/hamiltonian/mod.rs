//! Generalized Legendre transform and canonical Hamiltonian descriptions.
//!
//! For Lagrangians quadratic in the control, `L = ½uᵀRu − V(x)` with
//! `x' = A u`, the stationary point of the pseudo-Hamiltonian is explicit and
//! the canonical system `x' = ∇ₚH`, `p' = −∇ₓH` is solved as a two-point
//! problem by shooting. Integral constraints enter either through a terminal
//! costate `p(t1) = Qᵀμ` when `B = Q A`, or through a `μ`-shifted Hamiltonian
//! with `p(t1) = 0`; in both cases `μ` is found by Newton on the constraint.

mod canonical;
mod equivalence;
mod legendre;
mod system;


pub use canonical::{
    costate_from_lagrangian, energy_drift, integrate_canonical, solve_canonical, CanonicalSolution,
    CostateTrajectory, Regime,
};
pub use equivalence::{factor_through, rank_condition, verify_equivalence, Direction, EquivalenceReport, TrajectoryInput};
pub use legendre::{legendre_transform, pseudo_hamiltonian, HamiltonianSpec};
pub use system::{ElectromechParams, Potential, QuadraticLagrangianSystem, QuadraticPotential};
