use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ch_core::{Atom, EulerianState, PeakonAntipeakon, SolverConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Run configuration, one JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub initial: Initial,
    /// `[[position, mass], ...]`, added to whatever the preset carries.
    #[serde(default)]
    pub atoms: Vec<Atom<f64>>,
    pub solver: Solver,
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum Initial {
    /// `c e^{-|x - x0|}`.
    Peakon {
        #[serde(default = "one")]
        c: f64,
        #[serde(default)]
        x0: f64,
    },
    /// Either `d` and `t_star`, or `p0` and `q0`.
    PeakonAntipeakon {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_star: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p0: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q0: Option<f64>,
    },
    Zero,
    /// An Eulerian state JSON file, relative to the config file.
    File { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    #[default]
    Uniform,
    /// Uniform pieces with nodes on both peaks; peakon_antipeakon only.
    Fitted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solver {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_break: Option<f64>,
    /// Number of initial grid nodes.
    #[serde(rename = "N", alias = "n", default = "default_n")]
    pub n: usize,
    /// Interval carrying the initial grid.
    #[serde(default = "default_domain")]
    pub xi_domain: [f64; 2],
    #[serde(default)]
    pub grid: GridKind,
}

fn default_n() -> usize {
    1024
}

fn default_domain() -> [f64; 2] {
    [-20.0, 20.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    /// Output times; empty means `[0, t_end]`.
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    /// Relative to the config file.
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
}

fn default_formats() -> Vec<Format> {
    vec![Format::Both]
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

impl Default for Output {
    fn default() -> Self {
        Output { times: Vec::new(), formats: default_formats(), directory: default_directory() }
    }
}

/// A parsed config together with where it came from and its hash.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: Config,
    pub base: PathBuf,
    pub hash: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Config {
    pub fn from_json(text: &str) -> Result<Config> {
        serde_json::from_str(text).context("config does not match the schema")
    }

    /// Folds `output.formats` into one choice.
    pub fn format(&self) -> Format {
        let (c, j) = self.output.formats.iter().fold((false, false), |(c, j), f| (c || f.csv(), j || f.json()));
        match (c, j) {
            (true, false) => Format::Csv,
            (false, true) => Format::Json,
            _ => Format::Both,
        }
    }

    pub fn output_times(&self) -> Vec<f64> {
        if self.output.times.is_empty() {
            vec![0.0, self.solver.t_end]
        } else {
            self.output.times.clone()
        }
    }

    pub fn solver_config(&self) -> Result<SolverConfig<f64>> {
        let s = &self.solver;
        let mut cfg = SolverConfig::new(s.dt, s.t_end, self.output_times());
        cfg.eps_break = s.eps_break;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn oracle(&self) -> Result<PeakonAntipeakon<f64>> {
        match self.initial {
            Initial::PeakonAntipeakon { d, t_star, p0, q0 } => oracle_from(d, t_star, p0, q0),
            _ => bail!("preset {} has no closed form; use peakon_antipeakon", self.preset_name()),
        }
    }

    pub fn preset_name(&self) -> &'static str {
        match self.initial {
            Initial::Peakon { .. } => "peakon",
            Initial::PeakonAntipeakon { .. } => "peakon_antipeakon",
            Initial::Zero => "zero",
            Initial::File { .. } => "file",
        }
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        let s = &self.solver;
        let [a, b] = s.xi_domain;
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            bail!("xi_domain must be an increasing pair of finite numbers");
        }
        if s.n < 2 {
            bail!("N must be at least 2");
        }
        match s.grid {
            GridKind::Uniform => Ok(EulerianState::uniform_grid(a, b, s.n)),
            GridKind::Fitted => Ok(self.oracle()?.fitted_grid(a, b, s.n)?),
        }
    }

    /// The initial Eulerian state, with the configured atoms added.
    pub fn initial_state(&self, base: &Path) -> Result<EulerianState<f64>> {
        let u0 = match &self.initial {
            Initial::Peakon { c, x0 } => {
                let (c, x0) = (*c, *x0);
                EulerianState::from_fn(self.grid()?, |x| c * (-(x - x0).abs()).exp(), Vec::new())?
            }
            Initial::PeakonAntipeakon { .. } => self.oracle()?.initial_state(self.grid()?)?,
            Initial::Zero => EulerianState::zero(self.grid()?)?,
            Initial::File { path } => {
                let p = base.join(path);
                let text = fs::read_to_string(&p).with_context(|| format!("cannot read initial state {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("{} is not an Eulerian state", p.display()))?
            }
        };
        if self.atoms.is_empty() {
            return Ok(u0);
        }
        let mut atoms = u0.atoms().to_vec();
        atoms.extend(self.atoms.iter().copied());
        Ok(u0.with_atoms(atoms)?)
    }
}

pub fn oracle_from(d: Option<f64>, t_star: Option<f64>, p0: Option<f64>, q0: Option<f64>) -> Result<PeakonAntipeakon<f64>> {
    Ok(match (d, t_star, p0, q0) {
        (Some(d), Some(t), None, None) => PeakonAntipeakon::from_d_tstar(d, t)?,
        (None, None, Some(p), Some(q)) => PeakonAntipeakon::from_initial(p, q)?,
        _ => bail!("peakon_antipeakon needs either d and t_star, or p0 and q0"),
    })
}

/// Reads and parses a config. The hash covers the canonical config and, for
/// the file preset, the initial state file.
pub fn load(path: &Path) -> Result<Loaded> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    let config = Config::from_json(&text)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut bytes = serde_json::to_vec(&config)?;
    if let Initial::File { path } = &config.initial {
        let p = base.join(path);
        bytes.extend(fs::read(&p).with_context(|| format!("cannot read initial state {}", p.display()))?);
    }
    Ok(Loaded { hash: sha256_hex(&bytes), config, base })
}
