use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ch_core::diagnostics::{run_all, DiagnosticsConfig};
use ch_core::{solve, solve_from, CheckResult, DiagnosticsReport, LagrangianState, Snapshot, Trajectory};
use log::info;
use serde::{Deserialize, Serialize};

use crate::config::{self, Config, Format};
use crate::output::{write_plot_script, Provenance};
use crate::Outcome;

/// Everything needed to continue a run: the state at `t`, the config and the
/// breaking threshold that was in force.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub config: Config,
    pub t: f64,
    pub eps_break: f64,
    pub state: LagrangianState<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub t_start: f64,
    pub t_final: f64,
    pub steps: usize,
    pub eps_break: f64,
    pub breaking_events: usize,
    pub first_break: Option<f64>,
    pub final_energy: Option<f64>,
    pub final_nu: Option<f64>,
    pub report: DiagnosticsReport<f64>,
}

pub fn snapshot_name(t: f64) -> String {
    format!("snapshot_{t:.6}.json")
}

/// Trajectory checks plus the worst per-snapshot validation.
pub fn trajectory_report(snaps: &[Snapshot<f64>], dt: f64) -> DiagnosticsReport<f64> {
    let mut report = run_all(snaps, dt, &DiagnosticsConfig::default());
    let failing: Vec<(f64, &str)> =
        snaps.iter().flat_map(|s| s.report.failures().into_iter().map(move |name| (s.t, name))).collect();
    let mut c = CheckResult::from_residual(failing.len() as f64, 0.0);
    if let Some(&(t, name)) = failing.first() {
        c = c.at(Some(t), None).with_note(name);
    }
    report.insert("snapshot_validation", c);
    report
}

pub struct RunArgs {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub resume: Option<PathBuf>,
}

pub fn cmd_run(args: RunArgs) -> Result<Outcome> {
    let checkpoint = match &args.resume {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("cannot read checkpoint {}", p.display()))?;
            Some(serde_json::from_str::<Checkpoint>(&text).with_context(|| format!("{} is not a checkpoint", p.display()))?)
        }
        None => None,
    };
    let loaded = match (&args.config, &checkpoint) {
        (Some(p), _) => config::load(p)?,
        (None, Some(c)) => {
            let base = args.resume.as_deref().and_then(Path::parent).map(Path::to_path_buf).unwrap_or_default();
            config::Loaded { hash: config::sha256_hex(&serde_json::to_vec(&c.config)?), config: c.config.clone(), base }
        }
        (None, None) => bail!("run needs --config or --resume"),
    };
    let cfg = &loaded.config;
    let solver = cfg.solver_config()?;
    let prov = Provenance::new(&loaded.hash);
    let format = args.format.unwrap_or_else(|| cfg.format());
    let dir = args.out.clone().unwrap_or_else(|| loaded.base.join(&cfg.output.directory));

    let (traj, t_start) = match checkpoint {
        Some(c) => {
            info!("resuming from t = {} with {} nodes", c.t, c.state.len());
            let mut solver = solver.clone();
            solver.eps_break = Some(c.eps_break);
            (solve_from(c.state, c.t, &solver)?, c.t)
        }
        None => {
            let u0 = cfg.initial_state(&loaded.base)?;
            info!("{} initial state on {} nodes, nu = {:.6}", cfg.preset_name(), u0.len(), u0.nu_total());
            (solve(&u0, &solver)?, 0.0)
        }
    };
    info!("{} steps, {} breaking events", traj.steps, traj.events.len());

    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let summary = summarize(&traj, t_start);
    write_outputs(&dir, cfg, &traj, &summary, format, &prov)?;
    print!("{}", summary.report);
    println!("t = {} .. {}, {} steps, {} breaking events, output in {}", t_start, traj.final_time, traj.steps, traj.events.len(), dir.display());
    if summary.report.all_pass() {
        Ok(Outcome::Pass)
    } else {
        Ok(Outcome::DiagnosticFailure(summary.report.failures().join(", ")))
    }
}

fn summarize(traj: &Trajectory<f64>, t_start: f64) -> RunSummary {
    let last = traj.snapshots.last();
    RunSummary {
        t_start,
        t_final: traj.final_time,
        steps: traj.steps,
        eps_break: traj.eps_break,
        breaking_events: traj.events.len(),
        first_break: traj.events.iter().map(|e| e.tau).reduce(f64::min),
        final_energy: last.map(|s| s.eulerian.energy()),
        final_nu: last.map(|s| s.eulerian.nu_total()),
        report: trajectory_report(&traj.snapshots, traj.config.dt),
    }
}

fn write_outputs(
    dir: &Path,
    cfg: &Config,
    traj: &Trajectory<f64>,
    summary: &RunSummary,
    format: Format,
    prov: &Provenance,
) -> Result<()> {
    prov.write_json(&dir.join("config.json"), cfg)?;
    if format.json() {
        for s in &traj.snapshots {
            prov.write_json(&dir.join(snapshot_name(s.t)), s)?;
        }
    }
    if format.csv() {
        prov.write_text(&dir.join("snapshots.csv"), "#", |w| {
            writeln!(w, "t,x,u,F,p,p_x")?;
            for s in &traj.snapshots {
                let mut rows = Vec::new();
                s.eulerian.write_csv(&mut rows)?;
                for line in String::from_utf8_lossy(&rows).lines().skip(1) {
                    writeln!(w, "{},{line}", s.t)?;
                }
            }
            Ok(())
        })?;
        prov.write_text(&dir.join("atoms.csv"), "#", |w| {
            writeln!(w, "t,position,mass")?;
            for s in &traj.snapshots {
                for a in s.eulerian.atoms() {
                    writeln!(w, "{},{},{}", s.t, a.position, a.mass)?;
                }
            }
            Ok(())
        })?;
        write_plot_script(dir, "plot.py", "snapshots.csv", "u and F per output time", prov)?;
    }
    prov.write_json(&dir.join("report.json"), summary)?;
    let checkpoint =
        Checkpoint { config: cfg.clone(), t: traj.final_time, eps_break: traj.eps_break, state: traj.final_state.clone() };
    prov.write_json(&dir.join("checkpoint.json"), &checkpoint)
}
