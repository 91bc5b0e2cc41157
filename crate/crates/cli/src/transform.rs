use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use ch_core::{eul_to_lag, lag_to_eul_native, EulerianState, LagrangianState};

use crate::config::sha256_hex;
use crate::output::Provenance;
use crate::Outcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Direction {
    /// Eulerian state JSON to Lagrangian state JSON.
    ToLagrangian,
    /// Lagrangian state JSON to Eulerian state JSON on the collapsed node set.
    ToEulerian,
}

pub fn cmd_transform(direction: Direction, input: &Path, out: &Path) -> Result<Outcome> {
    let bytes = fs::read(input).with_context(|| format!("cannot read {}", input.display()))?;
    let prov = Provenance::new(sha256_hex(&bytes));
    match direction {
        Direction::ToLagrangian => {
            let u: EulerianState<f64> =
                serde_json::from_slice(&bytes).with_context(|| format!("{} is not an Eulerian state", input.display()))?;
            prov.write_json(out, &eul_to_lag(&u)?)?;
        }
        Direction::ToEulerian => {
            let x: LagrangianState<f64> =
                serde_json::from_slice(&bytes).with_context(|| format!("{} is not a Lagrangian state", input.display()))?;
            prov.write_json(out, &lag_to_eul_native(&x)?)?;
        }
    }
    Ok(Outcome::Pass)
}
