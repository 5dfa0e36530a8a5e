use rayon::prelude::*;
use serde_json::{json, Value};
use varlc_core::circuit::{build_matrices, build_stability_matrices};
use varlc_core::critical::{resonance_analysis, solve_critical_point, stationarity_expressions, stationarity_residual};
use varlc_core::hamiltonian::{
    energy_drift, solve_canonical, verify_equivalence, QuadraticLagrangianSystem, Regime, TrajectoryInput,
};
use varlc_core::numerics::{norm2, norm_inf, sym_eig, Matrix};
use varlc_core::spectral::{circuit_constants, classify_with_truncation};
use varlc_core::tolerances;
use varlc_core::variational::{constraint_residual, el_residual, ControlTrajectory};
use varlc_core::CircuitParams;

use crate::config::{set_circuit_key, OutputFormat, Preset, RegimeChoice, RunConfig};
use crate::error::{CliError, CliResult};
use crate::format;
use crate::sweep::SweepSpec;
use crate::trajectory::TrajectoryTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Constants,
    Classify,
    Solve,
    Hamiltonian,
    Residual,
    Sweep,
}

/// A command plus the inputs only some commands take.
#[derive(Debug, Clone)]
pub struct Request {
    pub command: Command,
    pub sweep: Option<SweepSpec>,
    pub trajectory: Option<TrajectoryTable>,
}

impl Request {
    pub fn new(command: Command) -> Self {
        Self { command, sweep: None, trajectory: None }
    }
}

/// What a command produced. `artifact` goes to the output path or stdout;
/// `summary`, when present, goes to stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Emitted {
    pub artifact: String,
    pub summary: Option<String>,
    pub tolerances_met: bool,
}

impl Emitted {
    fn json(value: &Value, tolerances_met: bool) -> Self {
        Self { artifact: format::json(value) + "\n", summary: None, tolerances_met }
    }

    /// CSV artifact with a JSON summary, or a single JSON document holding
    /// both when `format` is JSON.
    fn table(fmt: OutputFormat, columns: &[&str], rows: &[Vec<f64>], mut summary: Value, ok: bool) -> Self {
        match fmt {
            OutputFormat::Csv => Self {
                artifact: format::csv(columns, rows),
                summary: Some(format::json(&summary) + "\n"),
                tolerances_met: ok,
            },
            OutputFormat::Json => {
                summary["columns"] = json!(columns);
                summary["rows"] = json!(rows);
                Self::json(&summary, ok)
            }
        }
    }
}

pub fn run_command(cfg: &RunConfig, req: &Request) -> CliResult<Emitted> {
    match req.command {
        Command::Constants => constants(cfg),
        Command::Classify => classify(cfg),
        Command::Solve => solve(cfg),
        Command::Hamiltonian => hamiltonian(cfg),
        Command::Residual => {
            let table = req
                .trajectory
                .as_ref()
                .ok_or_else(|| CliError::Usage("residual needs --trajectory <csv>".into()))?;
            residual(cfg, table)
        }
        Command::Sweep => {
            let spec = req.sweep.as_ref().ok_or_else(|| CliError::Usage("sweep needs --sweep key=start:stop:count".into()))?;
            sweep(cfg, spec)
        }
    }
}

fn constants(cfg: &RunConfig) -> CliResult<Emitted> {
    let p = cfg.circuit()?;
    let (k, kt) = circuit_constants(p)?;
    let h = build_matrices(p)?.modal_values();
    let s = build_stability_matrices(p, k.k, kt.k);
    let ok = k.residual() <= tolerances::SERIES_RESIDUAL && kt.residual() <= tolerances::SERIES_RESIDUAL;
    let value = json!({
        "K_C1": k.k,
        "Ktilde_C2": kt.k,
        "K_C1_residual": k.residual(),
        "Ktilde_C2_residual": kt.residual(),
        "h1": h[0],
        "h2": h[1],
        "K1": s.k1,
        "K2": s.k2,
        "S1_eigenvalues": sym_eig(&s.s1)?.values,
        "S2_eigenvalues": sym_eig(&s.s2)?.values,
    });
    Ok(Emitted::json(&value, ok))
}

fn classify(cfg: &RunConfig) -> CliResult<Emitted> {
    let report = classify_with_truncation(cfg.circuit()?, cfg.trunc)?;
    let value = serde_json::to_value(&report).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Emitted::json(&value, true))
}

fn solve(cfg: &RunConfig) -> CliResult<Emitted> {
    let p = cfg.circuit()?;
    let (report, family) = resonance_analysis(p, 4)?;
    let sol = match (report.resonant, family) {
        (false, _) => solve_critical_point(p, cfg.steps)?,
        (true, Some(f)) => f.member(&vec![0.0; f.kernel.len()], cfg.steps)?,
        (true, None) => return Err(CliError::Unsolvable(Box::new(report))),
    };
    let charges = sol.charges();
    let currents = sol.currents();
    let l = stationarity_expressions(p, sol.times(), &charges, &currents)?;
    let rows: Vec<Vec<f64>> = sol
        .times()
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let (q, i, l) = (charges[k], currents[k], l[k]);
            vec![t, q[0], q[1], i[0], i[1], i[2], l[0], l[1], l[2]]
        })
        .collect();
    let st = stationarity_residual(p, &sol)?;
    let ok = sol.boundary_defect <= cfg.tol * (1.0 + norm2(&p.lambda())) && st.relative_deviation() <= cfg.residual_tol;
    let summary = json!({
        "resonance": report,
        "boundary_defect": sol.boundary_defect,
        "stationarity_constants": sol.stationarity_constants,
        "stationarity_relative_deviation": st.relative_deviation(),
        "tolerances_met": ok,
    });
    let columns = ["t", "q1", "q2", "i3", "i5", "i6", "l3", "l5", "l6"];
    Ok(Emitted::table(cfg.format.unwrap_or(OutputFormat::Csv), &columns, &rows, summary, ok))
}

/// The system, regime, state names and control names of the configured
/// Hamiltonian problem.
struct Problem {
    sys: QuadraticLagrangianSystem,
    regime: Regime,
    states: [&'static str; 2],
    controls: [&'static str; 3],
}

fn problem(cfg: &RunConfig) -> CliResult<Problem> {
    let (t0, t1) = cfg.horizon();
    let x0 = cfg.initial_state();
    let terminal = |sys: QuadraticLagrangianSystem| -> CliResult<QuadraticLagrangianSystem> {
        let target = cfg.target.ok_or_else(|| CliError::MissingKey("target_x1".into()))?;
        let alpha = (0..2).map(|k| -(target[k] - x0[k]) / (t1 - t0)).collect();
        let b = sys.a.clone();
        Ok(sys.with_constraint(b, alpha)?)
    };
    let special = || Regime::SpecialQ(Matrix::identity(2));
    Ok(match cfg.preset {
        Preset::Lc => {
            let p = cfg.circuit()?;
            let (sys, regime) = match cfg.regime {
                RegimeChoice::Free => (QuadraticLagrangianSystem::lc_circuit(p)?, Regime::Unconstrained),
                RegimeChoice::Terminal => (terminal(QuadraticLagrangianSystem::lc_circuit(p)?)?, special()),
                RegimeChoice::Integral => (QuadraticLagrangianSystem::lc_integral_constraints(p)?, Regime::General),
            };
            Problem { sys, regime, states: ["q1", "q2"], controls: ["i3", "i5", "i6"] }
        }
        Preset::Electromech => {
            let e = cfg.electromech.as_ref().ok_or_else(|| CliError::Usage("missing electromechanical data".into()))?;
            let base = QuadraticLagrangianSystem::electromechanical(&e.params)?;
            let (sys, regime) = match cfg.regime {
                RegimeChoice::Terminal => (terminal(base)?, special()),
                _ => (base, Regime::Unconstrained),
            };
            Problem { sys, regime, states: ["q", "theta"], controls: ["i1", "i2", "omega"] }
        }
    })
}

fn hamiltonian(cfg: &RunConfig) -> CliResult<Emitted> {
    let Problem { sys, regime, states, .. } = problem(cfg)?;
    let (t0, t1) = cfg.horizon();
    let x0 = cfg.initial_state();
    let sol = solve_canonical(&sys, &x0, &regime, t0, t1, cfg.steps)?;
    let ham = regime.hamiltonian(&sys, &sol.mu)?;
    let drift = energy_drift(&ham, &sol.x, &sol.p);
    let h0 = sol.h[0].abs();
    let forward = TrajectoryInput::Lagrangian { x0: x0.to_vec(), u: sol.controls()?, mu: sol.mu.clone() };
    let backward = TrajectoryInput::Hamiltonian { x: sol.x.clone(), p: sol.p.clone(), mu: sol.mu.clone() };
    let fwd = verify_equivalence(&sys, &forward, &regime)?;
    let back = verify_equivalence(&sys, &backward, &regime)?;
    let ok = fwd.max_relative <= cfg.residual_tol
        && back.max_relative <= cfg.residual_tol
        && drift <= cfg.residual_tol * h0.max(f64::MIN_POSITIVE);
    let rows: Vec<Vec<f64>> = (0..sol.x.len())
        .map(|k| {
            let mut row = vec![sol.x.times[k]];
            row.extend(&sol.x.states[k]);
            row.extend(&sol.p.values[k]);
            row.push(sol.h[k]);
            row
        })
        .collect();
    let summary = json!({
        "regime": regime.name(),
        "mu": sol.mu,
        "iterations": sol.iterations,
        "terminal_defect": sol.terminal_defect,
        "constraint_residual": sol.constraint_residual,
        "energy_drift": drift,
        "energy_drift_relative": if h0 > 0.0 { drift / h0 } else { drift },
        "equivalence": [fwd, back],
        "tolerances_met": ok,
    });
    let columns = ["t", states[0], states[1], "p1", "p2", "H"];
    Ok(Emitted::table(cfg.format.unwrap_or(OutputFormat::Csv), &columns, &rows, summary, ok))
}

/// `μ` from the terminal balance `R u(t1) = Bᵀμ`, which holds because the
/// adjoint vanishes at `t1`.
fn terminal_multipliers(sys: &QuadraticLagrangianSystem, u: &ControlTrajectory) -> CliResult<Vec<f64>> {
    let Some((b, _)) = &sys.constraint else { return Ok(Vec::new()) };
    let ru = sys.r.mul_vec(u.values.last().expect("at least two rows"));
    let bbt = b * &b.transpose();
    Ok(bbt.solve(&b.mul_vec(&ru))?)
}

fn residual(cfg: &RunConfig, table: &TrajectoryTable) -> CliResult<Emitted> {
    let Problem { sys, regime, controls, .. } = problem(cfg)?;
    let (t0, t1) = cfg.horizon();
    let times = table.times();
    let span_tol = 1e-9 * (t1 - t0).abs().max(1.0);
    if (times[0] - t0).abs() > span_tol || (times[times.len() - 1] - t1).abs() > span_tol {
        return Err(CliError::Trajectory(format!("`t` must run from t0 = {t0} to t1 = {t1}")));
    }
    let u = ControlTrajectory::new(times, table.select(&controls)?)?;
    let x0 = cfg.initial_state();
    let constrained = !matches!(regime, Regime::Unconstrained);
    let sys = if constrained { sys } else { sys.without_constraint() };
    let mu = terminal_multipliers(&sys, &u)?;
    let el = el_residual(&sys, &u, &x0, &mu)?;
    let el_max = el.states.iter().map(|v| norm_inf(v)).fold(0.0, f64::max);
    let scale = u.values.iter().map(|v| norm_inf(&sys.r.mul_vec(v))).fold(0.0, f64::max);
    let el_rel = if scale > 0.0 { el_max / scale } else { el_max };
    let (constraint, constraint_max, constraint_scale) = match &sys.constraint {
        Some((_, alpha)) => {
            let c = constraint_residual(&sys, &u, &x0)?;
            let m = norm_inf(&c);
            (Some(c), m, (norm_inf(alpha) * (t1 - t0)).max(1.0))
        }
        None => (None, 0.0, 1.0),
    };
    let ok = el_rel <= cfg.residual_tol && constraint_max <= cfg.residual_tol * constraint_scale;
    let value = json!({
        "regime": regime.name(),
        "mu": mu,
        "el_residual_max": el_max,
        "el_residual_relative": el_rel,
        "constraint_residual": constraint,
        "constraint_residual_max": constraint_max,
        "tolerances_met": ok,
    });
    Ok(Emitted::json(&value, ok))
}

fn sweep_point(base: &CircuitParams, key: &str, v: f64, trunc: usize) -> (Value, bool) {
    let mut p = *base;
    let outcome = set_circuit_key(&mut p, key, v)
        .and_then(|_| {
            if p.t1 > p.t0 {
                Ok(())
            } else {
                Err(CliError::Horizon { t0: p.t0, t1: p.t1 })
            }
        })
        .and_then(|_| Ok(p.validate()?))
        .and_then(|_| Ok(classify_with_truncation(&p, trunc)?));
    match outcome {
        Ok(r) => (
            json!({
                "key": key,
                "value": v,
                "verdict": r.verdict,
                "S1_least_eigenvalue": r.s1_eigenvalues[0],
                "S2_least_eigenvalue": r.s2_eigenvalues[0],
                "K_C1": r.k_c1,
                "Ktilde_C2": r.ktilde_c2,
                "mode": r.mode,
                "witness_ray": r.witness_ray,
            }),
            true,
        ),
        Err(e) => (json!({"key": key, "value": v, "error": e.to_string()}), false),
    }
}

fn sweep(cfg: &RunConfig, spec: &SweepSpec) -> CliResult<Emitted> {
    let base = cfg.circuit()?;
    let points: Vec<(Value, bool)> =
        spec.values().par_iter().map(|&v| sweep_point(base, &spec.key, v, cfg.trunc)).collect();
    let mut artifact = String::new();
    for (value, _) in &points {
        artifact.push_str(&format::json(value));
        artifact.push('\n');
    }
    Ok(Emitted { artifact, summary: None, tolerances_met: points.iter().all(|(_, ok)| *ok) })
}
