use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ch_core::{CheckResult, DiagnosticsReport, Snapshot};
use log::info;
use serde_json::Value;

use crate::config::Config;
use crate::output::{hash_of, Provenance};
use crate::run::trajectory_report;
use crate::Outcome;

/// Largest difference between stored and recomputed derived fields.
fn consistency(s: &Snapshot<f64>, c_floor: f64) -> Result<f64> {
    let again = Snapshot::new(s.t, s.lagrangian.clone(), c_floor)?;
    let diff = |a: &[f64], b: &[f64]| {
        if a.len() != b.len() {
            return f64::INFINITY;
        }
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    };
    let (e, f) = (&s.eulerian, &again.eulerian);
    let atoms = |s: &ch_core::EulerianState<f64>| s.atoms().iter().flat_map(|a| [a.position, a.mass]).collect::<Vec<_>>();
    Ok([
        diff(e.x(), f.x()),
        diff(e.u(), f.u()),
        diff(&atoms(e), &atoms(f)),
        diff(&s.pq.p, &again.pq.p),
        diff(&s.pq.q, &again.pq.q),
    ]
    .into_iter()
    .fold(0.0, f64::max))
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not valid JSON", path.display()))
}

pub fn cmd_verify(dir: &Path, out: Option<PathBuf>) -> Result<Outcome> {
    let mut config = read_json(&dir.join("config.json"))?;
    let hash = hash_of(&config).context("config.json carries no config hash")?.to_string();
    if let Value::Object(m) = &mut config {
        m.remove("version");
        m.remove("config_hash");
    }
    let config: Config = serde_json::from_value(config).context("config.json does not match the schema")?;

    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("snapshot_") && n.ends_with(".json")))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no JSON snapshots in {}; run with --format json or both", dir.display());
    }

    let mut snaps = Vec::new();
    let mut foreign = Vec::new();
    for f in &files {
        let v = read_json(f)?;
        if hash_of(&v) != Some(hash.as_str()) {
            foreign.push(f.clone());
        }
        let s: Snapshot<f64> = serde_json::from_value(v).with_context(|| format!("{} is not a snapshot", f.display()))?;
        snaps.push(s);
    }
    snaps.sort_by(|a, b| a.t.total_cmp(&b.t));
    info!("{} snapshots from {}", snaps.len(), dir.display());

    let mut report = trajectory_report(&snaps, config.solver.dt);
    let mut hashes = CheckResult::from_residual(foreign.len() as f64, 0.0);
    if let Some(f) = foreign.first() {
        hashes = hashes.with_note(f.display().to_string());
    }
    report.insert("config_hash", hashes);
    let c_floor = config.solver_config()?.c_floor;
    let mut worst = CheckResult::from_residual(0.0, 1e-12);
    for s in &snaps {
        let d = consistency(s, c_floor)?;
        if !(d <= worst.residual) {
            worst = CheckResult::from_residual(d, 1e-12).at(Some(s.t), None);
        }
    }
    report.insert("snapshot_consistency", worst);

    print!("{report}");
    let path = out.unwrap_or_else(|| dir.join("verify.json"));
    Provenance::new(hash).write_json(&path, &VerifyReport { snapshots: snaps.len(), report: report.clone() })?;
    println!("{} checks, {} failed, report in {}", report.checks.len(), report.failures().len(), path.display());
    if report.all_pass() {
        Ok(Outcome::Pass)
    } else {
        Ok(Outcome::DiagnosticFailure(report.failures().join(", ")))
    }
}

#[derive(serde::Serialize)]
struct VerifyReport {
    snapshots: usize,
    report: DiagnosticsReport<f64>,
}
