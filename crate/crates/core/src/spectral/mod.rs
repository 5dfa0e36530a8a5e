//! Fourier analysis of the constrained circuit action.

pub mod classify;
pub mod fourier;
pub mod lemma;
pub mod series;

pub use classify::{
    ascending_direction, classify_critical_structure, classify_with_truncation, descent_direction, ray_values,
    ClassificationReport, DescentMode, RayPoint, Verdict,
};
pub use fourier::{
    evaluate_functional, evaluate_functional_time_domain, sample_currents, FourierCurrents, FunctionalBreakdown,
};
pub use lemma::extremal_sequence;
pub use series::{circuit_constants, solve_series_constant, SeriesConstant};
