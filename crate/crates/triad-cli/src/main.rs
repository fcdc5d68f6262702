//! `triad`: equilibria, stability, simulation and operating diagrams for a
//! three-stage anaerobic digestion chemostat.
//!
//! Exit codes: 0 success, 2 configuration/validation error, 3 integration
//! failure (step underflow), 4 operating-diagram grid entirely invalid,
//! 5 validation suite found disagreements, 1 anything else.

mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use triad::diagram::{extract_boundaries, scan, DiagramGrid, ScanSpec};
use triad::model::ModelParams;
use triad::simulator::{check_omega, detect_convergence, integrate, SimConfig, Terminal};
use triad::validation::run_validation;
use triad::Error as TriadError;

use config::{ModelConfig, RunConfig};

#[derive(Parser)]
#[command(
    name = "triad",
    version,
    about = "Three-stage anaerobic digestion chemostat analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute every candidate equilibrium with existence margins and
    /// analytic plus numeric stability verdicts (JSON on stdout).
    Equilibria {
        /// JSON run configuration.
        config: PathBuf,
        /// Also write the report to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the model and write a trajectory CSV (t,X0,S1,X1,S2,X2,Z).
    Simulate {
        config: PathBuf,
        /// Trajectory CSV path (default: trajectory.csv or output.trajectory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan a two-parameter plane into a signature grid CSV plus a region
    /// boundary CSV.
    Diagram {
        config: PathBuf,
        /// Grid CSV path (default: diagram.csv or output.grid).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Boundary CSV path (default: boundaries.csv or output.boundaries).
        #[arg(long)]
        boundaries: Option<PathBuf>,
    },
    /// Run the seeded randomized validation suites (residuals, stability
    /// agreement, Routh identities) and report a JSON summary.
    Validate {
        #[arg(long, default_value_t = 500)]
        draws: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(1, format!("i/o error: {e}"))
    }
}

impl From<TriadError> for Failure {
    fn from(e: TriadError) -> Self {
        let code = match e {
            TriadError::StepUnderflow { .. } => 3,
            TriadError::InvalidParameter(_) => 2,
            _ => 1,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::new(1, format!("csv error: {e}"))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TRIAD_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Equilibria { config, out } => cmd_equilibria(&config, out.as_deref()),
        Command::Simulate { config, out } => cmd_simulate(&config, out.as_deref()),
        Command::Diagram {
            config,
            out,
            boundaries,
        } => cmd_diagram(&config, out.as_deref(), boundaries.as_deref()),
        Command::Validate { draws, seed } => cmd_validate(draws, seed),
    }
}

fn load_config(path: &Path) -> Result<(RunConfig, ModelParams<f64>), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(2, format!("cannot read {}: {e}", path.display())))?;
    let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| {
        Failure::new(
            2,
            format!(
                "{}: line {}, column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            ),
        )
    })?;
    let params = cfg
        .model
        .to_params()
        .map_err(|e| Failure::new(2, format!("{}: model: {e}", path.display())))?;
    Ok((cfg, params))
}

fn format_full(v: f64) -> String {
    format!("{v:.16e}")
}

fn cmd_equilibria(config: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let (cfg, params) = load_config(config)?;
    let report = report::equilibria_report(&params)?;
    let text = serde_json::to_string_pretty(&report)
        .map_err(|e| Failure::new(1, format!("serialization: {e}")))?;
    println!("{text}");
    let target = out
        .map(Path::to_path_buf)
        .or(cfg.output.as_ref().and_then(|o| o.report.clone()));
    if let Some(path) = target {
        std::fs::write(&path, format!("{text}\n"))?;
        log::info!("report written to {}", path.display());
    }
    Ok(())
}

fn cmd_simulate(config: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let (cfg, params) = load_config(config)?;
    let sim = cfg
        .sim
        .as_ref()
        .ok_or_else(|| Failure::new(2, "configuration has no `sim` block"))?;
    sim.initial_state
        .check_nonnegative()
        .map_err(|e| Failure::new(2, format!("initial state: {e}")))?;
    let mut sim_cfg = SimConfig::new(sim.t_end);
    sim_cfg.rtol = sim.rtol;
    sim_cfg.atol = sim.atol;
    sim_cfg.max_steps = sim.max_steps;
    sim_cfg.record_stride = sim.record_stride;
    sim_cfg.monitors_enabled = sim.monitors_enabled;

    let traj = integrate(&params, &sim.initial_state, &sim_cfg)?;

    let terminal = match triad::equilibria::equilibria(&params) {
        Ok(records) => detect_convergence(&traj, &records, &params),
        Err(_) => traj.terminal.clone(),
    };

    for v in &traj.monitor_violations {
        eprintln!(
            "monitor violation: {} at t = {} (magnitude {:.3e})",
            v.monitor, v.t, v.magnitude
        );
    }

    let path = out
        .map(Path::to_path_buf)
        .or(cfg.output.as_ref().and_then(|o| o.trajectory.clone()))
        .unwrap_or_else(|| PathBuf::from("trajectory.csv"));
    let mut writer = csv::Writer::from_path(&path)?;
    writer.write_record(["t", "X0", "S1", "X1", "S2", "X2", "Z"])?;
    for ((t, st), z) in traj.times.iter().zip(&traj.states).zip(&traj.z_values) {
        writer.write_record([
            format_full(*t),
            format_full(st.x0),
            format_full(st.s1),
            format_full(st.x1),
            format_full(st.s2),
            format_full(st.x2),
            format_full(*z),
        ])?;
    }
    writer
        .flush()
        .map_err(Failure::from)?;

    let omega = check_omega(&traj, &params, 1e-6 * traj.z_values[0].max(1.0))?;
    let summary = serde_json::json!({
        "terminal": terminal_json(&terminal),
        "rows": traj.times.len(),
        "steps": traj.steps,
        "out": path,
        "monitor_violations": traj.monitor_violations.len(),
        "omega_worst_excess": omega.worst_excess,
    });
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    Ok(())
}

fn terminal_json(t: &Terminal) -> serde_json::Value {
    match t {
        Terminal::ConvergedTo(label) => serde_json::json!({
            "type": "converged_to",
            "label": label.to_string(),
        }),
        Terminal::Running => serde_json::json!({ "type": "running" }),
        Terminal::MaxSteps => serde_json::json!({ "type": "max_steps" }),
    }
}

fn cmd_diagram(
    config: &Path,
    out: Option<&Path>,
    boundaries_out: Option<&Path>,
) -> Result<(), Failure> {
    let (cfg, params) = load_config(config)?;
    let block = cfg
        .scan
        .as_ref()
        .ok_or_else(|| Failure::new(2, "configuration has no `scan` block"))?;
    let spec = ScanSpec {
        axis_x: block.axis_x,
        axis_y: block.axis_y,
        x_range: (block.x_range[0], block.x_range[1]),
        y_range: (block.y_range[0], block.y_range[1]),
        nx: block.nx,
        ny: block.ny,
        base: params,
    };
    let grid: DiagramGrid<f64> = scan(&spec).map_err(|e| Failure::new(2, e.to_string()))?;
    if grid.valid_cells() == 0 {
        return Err(Failure::new(4, "every grid cell is invalid"));
    }

    let grid_path = out
        .map(Path::to_path_buf)
        .or(cfg.output.as_ref().and_then(|o| o.grid.clone()))
        .unwrap_or_else(|| PathBuf::from("diagram.csv"));
    let mut writer = csv::Writer::from_path(&grid_path)?;
    writer.write_record(["x", "y", "signature", "n_value"])?;
    for cell in &grid.cells {
        writer.write_record([
            format_full(cell.x),
            format_full(cell.y),
            cell.signature.clone(),
            cell.n_value.map(|n| n.to_string()).unwrap_or_default(),
        ])?;
    }
    writer
        .flush()
        .map_err(Failure::from)?;

    let bounds = extract_boundaries(&grid);
    let bounds_path = boundaries_out
        .map(Path::to_path_buf)
        .or(cfg.output.as_ref().and_then(|o| o.boundaries.clone()))
        .unwrap_or_else(|| PathBuf::from("boundaries.csv"));
    let mut writer = csv::Writer::from_path(&bounds_path)?;
    writer.write_record(["sig_a", "sig_b", "x", "y"])?;
    for b in &bounds {
        for (x, y) in &b.points {
            writer.write_record([
                b.sig_a.clone(),
                b.sig_b.clone(),
                format_full(*x),
                format_full(*y),
            ])?;
        }
    }
    writer
        .flush()
        .map_err(Failure::from)?;

    let summary = serde_json::json!({
        "cells": grid.cells.len(),
        "valid_cells": grid.valid_cells(),
        "distinct_signatures": grid
            .cells
            .iter()
            .filter(|c| c.valid)
            .map(|c| c.signature.as_str())
            .collect::<std::collections::BTreeSet<_>>()
            .len(),
        "boundary_pairs": bounds.len(),
        "grid": grid_path,
        "boundaries": bounds_path,
    });
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    Ok(())
}

fn cmd_validate(draws: usize, seed: u64) -> Result<(), Failure> {
    let report = run_validation(draws, seed);
    let pass = report.pass();
    let summary = serde_json::to_string_pretty(&report)
        .map_err(|e| Failure::new(1, format!("serialization: {e}")))?;
    println!("{summary}");
    if pass {
        Ok(())
    } else {
        // Dump reproduction configs for every failing draw.
        for failure in report.failures() {
            let model = ModelConfig::from(&failure.params);
            let repro = serde_json::json!({
                "label": failure.label,
                "detail": failure.detail,
                "config": { "model": model },
            });
            eprintln!("{}", serde_json::to_string(&repro).unwrap());
        }
        Err(Failure::new(
            5,
            format!("{} validation failures", report.failures().len()),
        ))
    }
}
