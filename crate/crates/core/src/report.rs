use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct CheckResult<T> {
    /// Worst residual found (0 when nothing was violated).
    pub residual: T,
    pub tolerance: T,
    pub pass: bool,
    /// Time of the worst residual, when the check spans a trajectory.
    pub t: Option<T>,
    /// Position (`x`) or label (`ξ`) of the worst residual.
    pub coordinate: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl<T: Scalar> CheckResult<T> {
    /// Passing iff `residual <= tolerance` and the residual is finite.
    pub fn from_residual(residual: T, tolerance: T) -> Self {
        CheckResult {
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
            t: None,
            coordinate: None,
            note: None,
        }
    }

    pub fn at(mut self, t: Option<T>, coordinate: Option<T>) -> Self {
        self.t = t;
        self.coordinate = coordinate;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Named checks, ordered by name.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct DiagnosticsReport<T> {
    pub checks: BTreeMap<String, CheckResult<T>>,
}

impl<T: Scalar> DiagnosticsReport<T> {
    pub fn new() -> Self {
        DiagnosticsReport { checks: BTreeMap::new() }
    }

    /// Inserts a check. Each name may appear only once.
    pub fn insert(&mut self, name: &str, result: CheckResult<T>) {
        let prev = self.checks.insert(name.to_string(), result);
        debug_assert!(prev.is_none(), "duplicate check {name}");
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult<T>> {
        self.checks.get(name)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|(_, c)| !c.pass)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    /// Merges `other`, prefixing its check names.
    pub fn merge_prefixed(&mut self, prefix: &str, other: DiagnosticsReport<T>) {
        for (k, v) in other.checks {
            self.insert(&format!("{prefix}{k}"), v);
        }
    }
}

impl<T: Scalar> fmt::Display for DiagnosticsReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<36} {:>6} {:>14} {:>14} {:>10} {:>14}", "check", "status", "residual", "tolerance", "t", "where")?;
        for (name, c) in &self.checks {
            let opt = |v: Option<T>| v.map(|v| format!("{:.4}", v.to_f64_lossy())).unwrap_or_else(|| "-".into());
            writeln!(
                f,
                "{:<36} {:>6} {:>14.6e} {:>14.6e} {:>10} {:>14}",
                name,
                if c.pass { "PASS" } else { "FAIL" },
                c.residual.to_f64_lossy(),
                c.tolerance.to_f64_lossy(),
                opt(c.t),
                opt(c.coordinate)
            )?;
        }
        Ok(())
    }
}
