use serde_json::{json, Value};
use thiserror::Error;
use varlc_core::critical::ResonanceReport;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },
    #[error("empty horizon: t1 = {t1} must exceed t0 = {t0}")]
    Horizon { t0: f64, t1: f64 },
    #[error("malformed configuration: {0}")]
    Syntax(String),
    #[error("malformed trajectory: {0}")]
    Trajectory(String),
    #[error("malformed sweep specification: {0}")]
    Sweep(String),
    #[error("{0}")]
    Usage(String),
    #[error("cannot access {path}: {message}")]
    Io { path: String, message: String },
    #[error("circuit is resonant and the boundary data lie outside the range of the propagator")]
    Unsolvable(Box<ResonanceReport>),
    #[error(transparent)]
    Core(#[from] varlc_core::Error),
}

impl CliError {
    pub(crate) fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::InvalidValue { key: key.into(), reason: reason.into() }
    }

    /// 1 i/o, 2 bad input, 3 resonant, 4 nonconvergence, 6 other numerical
    /// failure. Code 5 is reserved for runs that finish outside tolerance.
    pub fn exit_code(&self) -> u8 {
        use varlc_core::Error as E;
        match self {
            CliError::Io { .. } => 1,
            CliError::Unsolvable(_) | CliError::Core(E::Resonant { .. }) => 3,
            CliError::Core(E::NonConvergence { .. }) => 4,
            CliError::Core(E::Parameter { .. } | E::Dimension(_) | E::Domain { .. }) => 2,
            CliError::Core(_) => 6,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        use varlc_core::Error as E;
        match self {
            CliError::MissingKey(_) => "missing_key",
            CliError::UnknownKey(_) => "unknown_key",
            CliError::InvalidValue { .. } => "invalid_value",
            CliError::Horizon { .. } => "horizon",
            CliError::Syntax(_) => "syntax",
            CliError::Trajectory(_) => "trajectory",
            CliError::Sweep(_) => "sweep",
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Unsolvable(_) => "resonant_unsolvable",
            CliError::Core(E::Resonant { .. }) => "resonant",
            CliError::Core(E::NonConvergence { .. }) => "nonconvergence",
            CliError::Core(_) => "numerical",
        }
    }

    /// Machine-readable description for the error stream.
    pub fn diagnostic(&self) -> Value {
        let mut v = json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        let key = match self {
            CliError::MissingKey(k) | CliError::UnknownKey(k) => Some(k.clone()),
            CliError::InvalidValue { key, .. } => Some(key.clone()),
            CliError::Core(varlc_core::Error::Parameter { name, .. }) => Some(name.clone()),
            _ => None,
        };
        if let Some(k) = key {
            v["key"] = Value::String(k);
        }
        match self {
            CliError::Unsolvable(report) => {
                v["resonance"] = serde_json::to_value(report).unwrap_or(Value::Null);
            }
            CliError::Core(varlc_core::Error::NonConvergence { iterations, defect }) => {
                v["iterations"] = json!(iterations);
                v["defect"] = json!(defect);
            }
            _ => {}
        }
        v
    }
}
