use std::path::PathBuf;

use serde::Serialize;
use serde_json::{Map, Value};
use varlc_core::hamiltonian::ElectromechParams;
use varlc_core::CircuitParams;

use crate::error::{CliError, CliResult};

/// Circuit keys, all required for the `lc` preset.
pub const LC_KEYS: [&str; 13] = [
    "L3", "L4", "L5", "L6", "C1", "C2", "t0", "t1", "q1_0", "q2_0", "lambda3", "lambda5", "lambda6",
];

/// Keys required for the `electromech` preset.
pub const ELECTROMECH_KEYS: [&str; 11] =
    ["L1", "L2", "mass", "length", "gravity", "C0", "kappa", "t0", "t1", "q_0", "theta_0"];

/// Optional keys accepted with either preset.
pub const OPTIONAL_KEYS: [&str; 10] =
    ["preset", "trunc", "steps", "tol", "residual_tol", "out", "format", "regime", "target_x1", "target_x2"];

pub const DEFAULT_TRUNC: usize = 64;
pub const DEFAULT_STEPS: usize = 2048;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Lc,
    Electromech,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(CliError::invalid("format", format!("expected csv or json, got {other:?}"))),
        }
    }
}

/// How integral constraints are imposed on the Hamiltonian side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeChoice {
    /// No integral constraint.
    Free,
    /// Prescribed terminal state `(target_x1, target_x2)`.
    Terminal,
    /// The charge-transfer constraints `∫ i = λ` (`lc` only).
    Integral,
}

impl RegimeChoice {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "free" => Ok(RegimeChoice::Free),
            "terminal" => Ok(RegimeChoice::Terminal),
            "integral" => Ok(RegimeChoice::Integral),
            other => Err(CliError::invalid("regime", format!("expected free, terminal or integral, got {other:?}"))),
        }
    }
}

/// Pendulum-capacitor problem with its horizon and initial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElectromechSetup {
    pub params: ElectromechParams,
    pub t0: f64,
    pub t1: f64,
    pub q_0: f64,
    pub theta_0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub preset: Preset,
    /// Present for the `lc` preset.
    pub circuit: Option<CircuitParams>,
    /// Present for the `electromech` preset.
    pub electromech: Option<ElectromechSetup>,
    pub trunc: usize,
    pub steps: usize,
    /// Solver tolerance.
    pub tol: f64,
    /// Threshold for reported residuals.
    pub residual_tol: f64,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub regime: RegimeChoice,
    pub target: Option<[f64; 2]>,
}

impl RunConfig {
    pub fn circuit(&self) -> CliResult<&CircuitParams> {
        self.circuit
            .as_ref()
            .ok_or_else(|| CliError::Usage("this command needs the lc preset".into()))
    }

    pub fn horizon(&self) -> (f64, f64) {
        match (&self.circuit, &self.electromech) {
            (Some(c), _) => (c.t0, c.t1),
            (_, Some(e)) => (e.t0, e.t1),
            _ => (0.0, 1.0),
        }
    }

    pub fn initial_state(&self) -> [f64; 2] {
        match (&self.circuit, &self.electromech) {
            (Some(c), _) => [c.q1_0, c.q2_0],
            (_, Some(e)) => [e.q_0, e.theta_0],
            _ => [0.0, 0.0],
        }
    }

    pub fn set_trunc(&mut self, n: usize) -> CliResult<()> {
        self.trunc = positive_count("trunc", n)?;
        Ok(())
    }

    pub fn set_steps(&mut self, n: usize) -> CliResult<()> {
        self.steps = positive_count("steps", n)?;
        Ok(())
    }

    pub fn set_tol(&mut self, tol: f64) -> CliResult<()> {
        self.tol = positive_real("tol", tol)?;
        Ok(())
    }
}

fn positive_count(key: &str, n: usize) -> CliResult<usize> {
    if n == 0 {
        return Err(CliError::invalid(key, "must be a positive integer"));
    }
    Ok(n)
}

fn positive_real(key: &str, v: f64) -> CliResult<f64> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(CliError::invalid(key, "must be a positive finite number"));
    }
    Ok(v)
}

fn number(map: &Map<String, Value>, key: &str) -> CliResult<f64> {
    let v = map.get(key).ok_or_else(|| CliError::MissingKey(key.to_string()))?;
    let x = v.as_f64().ok_or_else(|| CliError::invalid(key, "must be a number"))?;
    if !x.is_finite() {
        return Err(CliError::invalid(key, "must be finite"));
    }
    Ok(x)
}

fn optional_number(map: &Map<String, Value>, key: &str) -> CliResult<Option<f64>> {
    map.contains_key(key).then(|| number(map, key)).transpose()
}

fn optional_count(map: &Map<String, Value>, key: &str, default: usize) -> CliResult<usize> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => {
            let n = v.as_u64().ok_or_else(|| CliError::invalid(key, "must be a positive integer"))?;
            let n = usize::try_from(n).map_err(|_| CliError::invalid(key, "is too large"))?;
            positive_count(key, n)
        }
    }
}

fn optional_string<'a>(map: &'a Map<String, Value>, key: &str) -> CliResult<Option<&'a str>> {
    match map.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(_) => Err(CliError::invalid(key, "must be a string")),
    }
}

fn strictly_positive(key: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::invalid(key, "must be strictly positive"))
    }
}

fn check_horizon(t0: f64, t1: f64) -> CliResult<()> {
    if t1 > t0 {
        Ok(())
    } else {
        Err(CliError::Horizon { t0, t1 })
    }
}

fn parse_circuit(map: &Map<String, Value>) -> CliResult<CircuitParams> {
    let get = |k: &str| number(map, k);
    let p = CircuitParams {
        l3: strictly_positive("L3", get("L3")?)?,
        l4: get("L4")?,
        l5: strictly_positive("L5", get("L5")?)?,
        l6: strictly_positive("L6", get("L6")?)?,
        c1: strictly_positive("C1", get("C1")?)?,
        c2: strictly_positive("C2", get("C2")?)?,
        t0: get("t0")?,
        t1: get("t1")?,
        q1_0: get("q1_0")?,
        q2_0: get("q2_0")?,
        lambda3: get("lambda3")?,
        lambda5: get("lambda5")?,
        lambda6: get("lambda6")?,
    };
    if p.l4 < 0.0 {
        return Err(CliError::invalid("L4", "must be non-negative"));
    }
    check_horizon(p.t0, p.t1)?;
    p.validate()?;
    Ok(p)
}

fn parse_electromech(map: &Map<String, Value>) -> CliResult<ElectromechSetup> {
    let get = |k: &str| number(map, k);
    let params = ElectromechParams {
        l1: strictly_positive("L1", get("L1")?)?,
        l2: strictly_positive("L2", get("L2")?)?,
        mass: strictly_positive("mass", get("mass")?)?,
        length: strictly_positive("length", get("length")?)?,
        gravity: get("gravity")?,
        c0: strictly_positive("C0", get("C0")?)?,
        kappa: get("kappa")?,
    };
    let setup = ElectromechSetup { params, t0: get("t0")?, t1: get("t1")?, q_0: get("q_0")?, theta_0: get("theta_0")? };
    check_horizon(setup.t0, setup.t1)?;
    params.validate()?;
    Ok(setup)
}

/// Parses a flat JSON configuration. Unknown and missing keys are reported
/// by name; absent optional keys take their defaults.
pub fn parse_config(text: &str) -> CliResult<RunConfig> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Syntax(e.to_string()))?;
    let Value::Object(map) = value else {
        return Err(CliError::Syntax("configuration must be a JSON object".into()));
    };
    let preset = match optional_string(&map, "preset")? {
        None | Some("lc") => Preset::Lc,
        Some("electromech") => Preset::Electromech,
        Some(other) => return Err(CliError::invalid("preset", format!("unknown preset {other:?}"))),
    };
    let required: &[&str] = match preset {
        Preset::Lc => &LC_KEYS,
        Preset::Electromech => &ELECTROMECH_KEYS,
    };
    if let Some(k) = map.keys().find(|k| !required.contains(&k.as_str()) && !OPTIONAL_KEYS.contains(&k.as_str())) {
        return Err(CliError::UnknownKey(k.clone()));
    }
    if let Some(k) = required.iter().find(|k| !map.contains_key(**k)) {
        return Err(CliError::MissingKey(k.to_string()));
    }
    let (circuit, electromech) = match preset {
        Preset::Lc => (Some(parse_circuit(&map)?), None),
        Preset::Electromech => (None, Some(parse_electromech(&map)?)),
    };
    let tol = optional_number(&map, "tol")?.map_or(Ok(DEFAULT_TOL), |v| positive_real("tol", v))?;
    let residual_tol =
        optional_number(&map, "residual_tol")?.map_or(Ok(DEFAULT_RESIDUAL_TOL), |v| positive_real("residual_tol", v))?;
    let format = optional_string(&map, "format")?.map(OutputFormat::parse).transpose()?;
    let regime = match optional_string(&map, "regime")? {
        Some(s) => RegimeChoice::parse(s)?,
        None if preset == Preset::Lc => RegimeChoice::Integral,
        None => RegimeChoice::Free,
    };
    if regime == RegimeChoice::Integral && preset == Preset::Electromech {
        return Err(CliError::invalid("regime", "integral constraints exist only for the lc preset"));
    }
    let target = match (optional_number(&map, "target_x1")?, optional_number(&map, "target_x2")?) {
        (Some(a), Some(b)) => Some([a, b]),
        (None, None) => None,
        (None, _) => return Err(CliError::MissingKey("target_x1".into())),
        (_, None) => return Err(CliError::MissingKey("target_x2".into())),
    };
    if regime == RegimeChoice::Terminal && target.is_none() {
        return Err(CliError::MissingKey("target_x1".into()));
    }
    Ok(RunConfig {
        preset,
        circuit,
        electromech,
        trunc: optional_count(&map, "trunc", DEFAULT_TRUNC)?,
        steps: optional_count(&map, "steps", DEFAULT_STEPS)?,
        tol,
        residual_tol,
        out: optional_string(&map, "out")?.map(PathBuf::from),
        format,
        regime,
        target,
    })
}

/// Sets one circuit key by name.
pub fn set_circuit_key(p: &mut CircuitParams, key: &str, v: f64) -> CliResult<()> {
    let slot = match key {
        "L3" => &mut p.l3,
        "L4" => &mut p.l4,
        "L5" => &mut p.l5,
        "L6" => &mut p.l6,
        "C1" => &mut p.c1,
        "C2" => &mut p.c2,
        "t0" => &mut p.t0,
        "t1" => &mut p.t1,
        "q1_0" => &mut p.q1_0,
        "q2_0" => &mut p.q2_0,
        "lambda3" => &mut p.lambda3,
        "lambda5" => &mut p.lambda5,
        "lambda6" => &mut p.lambda6,
        other => return Err(CliError::UnknownKey(other.to_string())),
    };
    *slot = v;
    Ok(())
}
