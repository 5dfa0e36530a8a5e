use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite (least eigenvalue {least:e})")]
    NotPositiveDefinite { least: f64 },

    #[error("matrix is singular or too ill-conditioned to invert")]
    Singular,

    #[error("non-finite state encountered at t = {time}")]
    Divergence { time: f64 },

    #[error("root is not bracketed: f({lo}) = {f_lo:e}, f({hi}) = {f_hi:e}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: String, reason: String },

    #[error("t = {t} lies outside the horizon [{t0}, {t1}]")]
    Domain { t: f64, t0: f64, t1: f64 },

    #[error("classification precondition failed: {0}")]
    Classification(String),

    #[error("circuit is resonant (channel h{channel}, k = {k}); use resonance analysis")]
    Resonant { channel: usize, k: u64 },

    #[error("did not converge after {iterations} iterations (last defect {defect:e})")]
    NonConvergence { iterations: usize, defect: f64 },
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
