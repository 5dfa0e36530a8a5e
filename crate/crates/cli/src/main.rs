use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use varlc::{
    format, parse_config, parse_sweep_spec, parse_trajectory, run_command, CliError, CliResult, Command, OutputFormat,
    Request, EXIT_TOLERANCE,
};

/// Variational analysis of LC circuits and control-affine Lagrange problems.
#[derive(Debug, Parser)]
#[command(name = "varlc", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Flat JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Fourier truncation order for witness rays.
    #[arg(long)]
    trunc: Option<usize>,
    /// Grid steps for trajectories.
    #[arg(long)]
    steps: Option<usize>,
    /// Solver tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// `key=start:stop:count[:log]` for the sweep command.
    #[arg(long)]
    sweep: Option<String>,
    /// Trajectory CSV for the residual command.
    #[arg(long)]
    trajectory: Option<PathBuf>,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

fn run(args: Args) -> CliResult<u8> {
    let mut cfg = parse_config(&read(&args.config)?)?;
    if let Some(n) = args.trunc {
        cfg.set_trunc(n)?;
    }
    if let Some(n) = args.steps {
        cfg.set_steps(n)?;
    }
    if let Some(t) = args.tol {
        cfg.set_tol(t)?;
    }
    if let Some(f) = &args.format {
        cfg.format = Some(OutputFormat::parse(f)?);
    }
    if args.out.is_some() {
        cfg.out = args.out.clone();
    }
    let mut req = Request::new(args.command);
    req.sweep = args.sweep.as_deref().map(parse_sweep_spec).transpose()?;
    req.trajectory = match &args.trajectory {
        Some(p) => Some(parse_trajectory(&read(p)?)?),
        None => None,
    };
    let emitted = run_command(&cfg, &req)?;
    match &cfg.out {
        Some(path) => fs::write(path, &emitted.artifact)
            .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(emitted.artifact.as_bytes())
                .map_err(|e| CliError::Io { path: "stdout".into(), message: e.to_string() })?;
        }
    }
    if let Some(summary) = &emitted.summary {
        eprint!("{summary}");
    }
    Ok(if emitted.tolerances_met { 0 } else { EXIT_TOLERANCE })
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", format::json(&e.diagnostic()));
            ExitCode::from(e.exit_code())
        }
    }
}
