use serde::Serialize;

use crate::config::LC_KEYS;
use crate::error::{CliError, CliResult};

const MAX_POINTS: usize = 1_000_000;

/// `key=start:stop:count`, optionally suffixed `:log` for geometric spacing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub key: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl SweepSpec {
    /// Sweep values, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                let s = k as f64 / last;
                if k == 0 {
                    self.start
                } else if k + 1 == self.count {
                    self.stop
                } else if self.log {
                    (self.start.ln() + s * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + s * (self.stop - self.start)
                }
            })
            .map(|v| v.clamp(self.start.min(self.stop), self.start.max(self.stop)))
            .collect()
    }
}

pub fn parse_sweep_spec(text: &str) -> CliResult<SweepSpec> {
    let (key, range) = text
        .split_once('=')
        .ok_or_else(|| CliError::Sweep(format!("expected key=start:stop:count, got {text:?}")))?;
    let key = key.trim();
    if !LC_KEYS.contains(&key) {
        return Err(CliError::Sweep(format!("`{key}` is not a circuit parameter")));
    }
    let parts: Vec<&str> = range.split(':').map(str::trim).collect();
    let log = match parts.as_slice() {
        [_, _, _] => false,
        [_, _, _, "log"] => true,
        [_, _, _, other] => return Err(CliError::Sweep(format!("unknown spacing {other:?}"))),
        _ => return Err(CliError::Sweep("expected start:stop:count".into())),
    };
    let real = |s: &str, name: &str| -> CliResult<f64> {
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(CliError::Sweep(format!("{name} is not a finite number: {s:?}"))),
        }
    };
    let start = real(parts[0], "start")?;
    let stop = real(parts[1], "stop")?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| CliError::Sweep(format!("count is not a positive integer: {:?}", parts[2])))?;
    if count == 0 || count > MAX_POINTS {
        return Err(CliError::Sweep(format!("count must lie in 1..={MAX_POINTS}")));
    }
    if log && !(start > 0.0 && stop > 0.0) {
        return Err(CliError::Sweep("log spacing needs positive endpoints".into()));
    }
    Ok(SweepSpec { key: key.to_string(), start, stop, count, log })
}
