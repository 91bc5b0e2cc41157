//! `ch`: runs, verifies and transforms dissipative Camassa–Holm solutions.
//!
//! Exit codes: 0 success, 1 runtime or input error, 2 a diagnostic failed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod oracle;
mod output;
mod run;
mod transform;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::Format;
use crate::transform::Direction;

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// Names of the failing checks.
    DiagnosticFailure(String),
}

#[derive(Parser)]
#[command(name = "ch", version, about = "Dissipative Camassa-Holm solver in Lagrangian coordinates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve from a config (or a checkpoint) and write snapshots and a report.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory; overrides `output.directory`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `output.formats`.
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Continue from a `checkpoint.json`.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Tabulate the exact peakon-antipeakon solution as `t,x,u,F,p,p_x`.
    Oracle {
        /// A config with the peakon_antipeakon preset; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        d: Option<f64>,
        #[arg(long)]
        t_star: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        p0: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        q0: Option<f64>,
        /// Comma-separated output times.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        times: Option<Vec<f64>>,
        /// `a,b`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x_range: Option<Vec<f64>>,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long, default_value = "oracle_out")]
        out: PathBuf,
    },
    /// Re-run every check on a run directory.
    Verify {
        dir: PathBuf,
        /// Where to write the JSON report (default `DIR/verify.json`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Map a state file between Eulerian and Lagrangian form.
    Transform {
        #[command(subcommand)]
        direction: Direction,
        #[arg(global = true, long)]
        input: Option<PathBuf>,
        #[arg(global = true, long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(cmd: Command) -> anyhow::Result<Outcome> {
    match cmd {
        Command::Run { config, out, format, resume } => run::cmd_run(run::RunArgs { config, out, format, resume }),
        Command::Oracle { config, d, t_star, p0, q0, times, x_range, nx, out } => {
            let x_range = match x_range.as_deref() {
                None => None,
                Some(&[a, b]) => Some([a, b]),
                Some(_) => anyhow::bail!("--x-range takes exactly two numbers, a,b"),
            };
            oracle::cmd_oracle(oracle::OracleArgs { config, d, t_star, p0, q0, times, x_range, nx, out })
        }
        Command::Verify { dir, out } => verify::cmd_verify(&dir, out),
        Command::Transform { direction, input, out } => {
            let input = input.ok_or_else(|| anyhow::anyhow!("transform needs --input"))?;
            let out = out.ok_or_else(|| anyhow::anyhow!("transform needs --out"))?;
            transform::cmd_transform(direction, &input, &out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CH_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::DiagnosticFailure(names)) => {
            eprintln!("diagnostics failed: {names}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
