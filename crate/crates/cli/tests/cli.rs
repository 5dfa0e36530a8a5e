use std::path::Path;
use std::process::Command as Process;

use serde_json::Value;
use varlc::{parse_config, parse_trajectory, run_command, Command, Request, RunConfig};
use varlc_core::circuit::{build_matrices, build_stability_matrices};
use varlc_core::critical::solve_critical_point;
use varlc_core::hamiltonian::QuadraticLagrangianSystem;
use varlc_core::numerics::Matrix;
use varlc_core::spectral::{circuit_constants, classify_with_truncation, Verdict};
use varlc_core::tolerances::DEFINITENESS;
use varlc_core::variational::{el_residual, ControlTrajectory};

const UNIT: &str = r#"{"L3":1,"L4":1,"L5":1,"L6":1,"C1":1,"C2":1,"t0":0,"t1":1,
    "q1_0":0.3,"q2_0":-0.2,"lambda3":0.1,"lambda5":0.2,"lambda6":-0.1}"#;

fn config(text: &str) -> RunConfig {
    parse_config(text).unwrap()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text.trim()).unwrap()
}

fn float(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn constants_match_library() {
    let cfg = config(UNIT);
    let out = run_command(&cfg, &Request::new(Command::Constants)).unwrap();
    assert!(out.tolerances_met);
    let v = json(&out.artifact);
    let p = cfg.circuit().unwrap();
    let h = build_matrices(p).unwrap().modal_values();
    let (k, kt) = circuit_constants(p).unwrap();
    assert_eq!(float(&v, "h1"), h[0]);
    assert_eq!(float(&v, "h2"), h[1]);
    assert_eq!(float(&v, "K_C1"), k.k);
    assert_eq!(float(&v, "Ktilde_C2"), kt.k);
    assert_eq!(v["S1_eigenvalues"].as_array().unwrap().len(), 3);
}

#[test]
fn zero_circuit_gives_zero_trajectory() {
    let text = UNIT.replace("0.3", "0").replace("-0.2", "0").replace("0.1", "0").replace("0.2", "0").replace("-0.1", "0");
    let mut cfg = config(&text);
    cfg.set_steps(32).unwrap();
    let out = run_command(&cfg, &Request::new(Command::Solve)).unwrap();
    let table = parse_trajectory(&out.artifact).unwrap();
    assert_eq!(table.columns, ["t", "q1", "q2", "i3", "i5", "i6", "l3", "l5", "l6"]);
    assert_eq!(table.rows.len(), 33);
    assert!(table.rows.iter().all(|r| r[1..].iter().all(|&x| x == 0.0)));
    assert!(out.tolerances_met);
}

#[test]
fn csv_round_trip_reproduces_residuals() {
    let mut cfg = config(UNIT);
    cfg.set_steps(400).unwrap();
    let solved = run_command(&cfg, &Request::new(Command::Solve)).unwrap();
    let mut req = Request::new(Command::Residual);
    req.trajectory = Some(parse_trajectory(&solved.artifact).unwrap());
    let out = run_command(&cfg, &req).unwrap();
    assert!(out.tolerances_met);
    let v = json(&out.artifact);

    let p = cfg.circuit().unwrap();
    let sol = solve_critical_point(p, 400).unwrap();
    let u = ControlTrajectory::new(sol.times().to_vec(), sol.currents().iter().map(|c| c.to_vec()).collect()).unwrap();
    let sys = QuadraticLagrangianSystem::lc_integral_constraints(p).unwrap();
    let mu: Vec<f64> = v["mu"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (a, b) in mu.iter().zip(&sol.stationarity_constants) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
    let el = el_residual(&sys, &u, &[p.q1_0, p.q2_0], &sol.stationarity_constants).unwrap();
    let el_max = el.states.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    assert!((float(&v, "el_residual_max") - el_max).abs() < 1e-9);
}

#[test]
fn hamiltonian_command_meets_tolerances() {
    let mut cfg = config(UNIT);
    cfg.set_steps(400).unwrap();
    for regime in ["free", "integral"] {
        let text = UNIT.replace('}', &format!(r#","regime":"{regime}","format":"json"}}"#));
        let mut cfg2 = config(&text);
        cfg2.set_steps(400).unwrap();
        let out = run_command(&cfg2, &Request::new(Command::Hamiltonian)).unwrap();
        assert!(out.tolerances_met, "{regime}");
        let v = json(&out.artifact);
        assert_eq!(v["columns"].as_array().unwrap().len(), 6);
        assert!(float(&v, "energy_drift_relative") < 1e-6);
    }
    let out = run_command(&cfg, &Request::new(Command::Hamiltonian)).unwrap();
    assert!(out.artifact.starts_with("t,q1,q2,p1,p2,H\n"));
    assert!(out.summary.is_some());
}

fn leading_minors(m: &Matrix) -> [f64; 3] {
    let d2 = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let d3 = m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]);
    [m[(0, 0)], d2, d3]
}

#[test]
fn sweep_verdict_flips_at_definiteness_boundary() {
    let cfg = config(UNIT);
    let mut req = Request::new(Command::Sweep);
    req.sweep = Some(varlc::parse_sweep_spec("C1=0.05:5:41:log").unwrap());
    let out = run_command(&cfg, &req).unwrap();
    let points: Vec<Value> = out.artifact.lines().map(json).collect();
    assert_eq!(points.len(), 41);

    let mut flips = 0;
    let mut previous: Option<(bool, f64)> = None;
    for v in &points {
        let mut p = *cfg.circuit().unwrap();
        p.c1 = float(v, "value");
        let r = classify_with_truncation(&p, cfg.trunc).unwrap();
        let s1 = build_stability_matrices(&p, r.k_c1, r.ktilde_c2).s1;
        let definite = leading_minors(&s1).iter().all(|&d| d > 0.0);
        let least = float(v, "S1_least_eigenvalue");
        assert_eq!(definite, least > 0.0);
        let minimum = v["verdict"] == "UniqueMinimum";
        assert_eq!(minimum, least > DEFINITENESS, "{v}");
        assert_eq!(minimum, r.verdict == Verdict::UniqueMinimum);
        if let Some((was, det)) = previous {
            if was != minimum {
                flips += 1;
                assert!(det * leading_minors(&s1)[2] <= 0.0 || least.abs() < 1e-6);
            }
        }
        previous = Some((minimum, leading_minors(&s1)[2]));
    }
    assert_eq!(flips, 1);
}

fn binary(args: &[&str], dir: &Path) -> (i32, String, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_varlc")).args(args).current_dir(dir).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn binary_exit_codes_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| std::fs::write(dir.path().join(name), text).unwrap();
    write("unit.json", UNIT);
    write("missing.json", &UNIT.replace(r#""C2":1,"#, ""));
    write("resonant.json", r#"{"L3":1,"L4":0,"L5":1,"L6":1,"C1":1,"C2":1,"t0":0,"t1":3.141592653589793,
        "q1_0":0.3,"q2_0":0,"lambda3":1,"lambda5":0,"lambda6":0}"#);

    let (code, stdout, _) = binary(&["constants", "--config", "unit.json"], dir.path());
    assert_eq!(code, 0);
    assert!(json(&stdout)["h1"].is_f64());

    let (code, _, stderr) = binary(&["classify", "--config", "missing.json"], dir.path());
    assert_eq!(code, 2);
    let d = json(&stderr);
    assert_eq!(d["key"], "C2");

    let (code, _, stderr) = binary(&["solve", "--config", "resonant.json", "--steps", "16"], dir.path());
    assert_eq!(code, 3, "{stderr}");
    assert_eq!(json(&stderr)["resonance"]["resonant"], true);

    let (code, _, _) = binary(&["classify", "--config", "absent.json"], dir.path());
    assert_eq!(code, 1);

    let (code, _, _) = binary(&["sweep", "--config", "unit.json"], dir.path());
    assert_eq!(code, 2);

    let (code, stdout, _) = binary(&["solve", "--config", "unit.json", "--steps", "1024", "--out", "s.csv"], dir.path());
    assert_eq!((code, stdout.as_str()), (0, ""));
    let (code, stdout, _) =
        binary(&["residual", "--config", "unit.json", "--trajectory", "s.csv"], dir.path());
    assert_eq!(code, 0);
    assert!(json(&stdout)["el_residual_max"].as_f64().unwrap() < 1e-4);

    // a coarse grid cannot meet the stationarity tolerance
    let (code, _, stderr) = binary(&["solve", "--config", "unit.json", "--steps", "2"], dir.path());
    assert_eq!(code, 5, "{stderr}");
}
