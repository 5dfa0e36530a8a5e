//! Numerical tolerances shared across the crate and its test suites.
//!
//! Every threshold used in validation is pinned here so that tests and the
//! CLI agree on what "within tolerance" means.

/// Relative residual allowed for exact algebraic reconstructions
/// (eigendecomposition, matrix square roots).
pub const ALGEBRAIC: f64 = 1e-10;

/// Absolute eigenvalue cutoff used when classifying definiteness.
pub const DEFINITENESS: f64 = 1e-8;

/// Relative distance of `T·√h/π` from an integer below which a circuit is resonant.
pub const RESONANCE: f64 = 1e-9;

/// Relative distance below which a circuit is reported as near-resonant
/// (solvable but badly conditioned).
pub const NEAR_RESONANCE: f64 = 1e-6;

/// Relative singular-value cutoff for kernels of propagator matrices.
pub const KERNEL: f64 = 1e-7;

/// Relative singular-value cutoff for rank decisions.
pub const RANK: f64 = 1e-10;

/// Residual required of series constants.
pub const SERIES_RESIDUAL: f64 = 1e-10;

/// Symmetry check on user supplied matrices, relative to the largest entry.
pub const SYMMETRY: f64 = 1e-10;

/// Defect at which the canonical shooting iteration stops.
pub const SHOOTING: f64 = 1e-10;

/// Maximum Newton iterations for shooting and multiplier solves.
pub const MAX_NEWTON_ITERATIONS: usize = 50;
