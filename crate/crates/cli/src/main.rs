//! `dscharge`: batch driver for charges, horizons, constraints, chart maps and the verification suite.
//!
//! Exit status: 0 success, 1 malformed config or I/O failure, 2 domain or
//! singularity error, 3 verification failure.

mod config;
mod tasks;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use config::Task;
use tasks::TaskError;

#[derive(Debug, Parser)]
#[command(name = "dscharge", version, about = "Conserved charges of asymptotically de Sitter initial data")]
pub struct Cli {
    /// charges | horizon | constraints | chart | verify
    #[arg(value_enum)]
    pub task: Task,
    /// JSON job file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// de-sitter | mcvittie | kerr-ds
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// standard | shifted
    #[arg(long)]
    pub psi_range: Option<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write raw per-radius samples as CSV (charges task).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Source chart (chart task).
    #[arg(long)]
    pub from: Option<String>,
    /// Target chart (chart task).
    #[arg(long)]
    pub to: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub psi: Option<f64>,
    #[arg(long)]
    pub n_theta: Option<usize>,
    #[arg(long)]
    pub n_psi: Option<usize>,
    /// Horizon sign: future | past.
    #[arg(long)]
    pub sign: Option<String>,
    /// Relative Λ perturbation applied to the verification data.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_mismatch: Option<f64>,
}

fn emit_error(v: serde_json::Value) {
    eprintln!("{}", serde_json::to_string_pretty(&v).expect("json"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match config::build(&cli) {
        Ok(c) => c,
        Err(e) => {
            emit_error(json!({"error": "config", "pointer": e.pointer, "message": e.message}));
            return ExitCode::from(1);
        }
    };
    match tasks::run(&cfg) {
        Ok(outcome) => {
            if outcome.failed {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(TaskError::Core(e)) => {
            emit_error(json!({
                "error": e.kind(),
                "message": e.to_string(),
                "task": cfg.task,
                "model": cfg.model,
            }));
            ExitCode::from(2)
        }
        Err(TaskError::Io(e)) => {
            emit_error(json!({"error": "io", "message": format!("{e:#}")}));
            ExitCode::from(1)
        }
    }
}
