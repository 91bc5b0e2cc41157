use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use ch_core::EulerianState;
use serde::Serialize;

use crate::config::{self, Initial};
use crate::output::{sha256_of, write_plot_script, Provenance};
use crate::Outcome;

pub struct OracleArgs {
    pub config: Option<PathBuf>,
    pub d: Option<f64>,
    pub t_star: Option<f64>,
    pub p0: Option<f64>,
    pub q0: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub x_range: Option<[f64; 2]>,
    pub nx: Option<usize>,
    pub out: PathBuf,
}

/// The parameters the table depends on, hashed for provenance.
#[derive(Debug, Serialize)]
struct TableParams {
    p0: f64,
    q0: f64,
    times: Vec<f64>,
    x_range: [f64; 2],
    nx: usize,
}

pub fn cmd_oracle(args: OracleArgs) -> Result<Outcome> {
    let from_file = args.config.as_deref().map(config::load).transpose()?.map(|l| l.config);
    let (mut d, mut t_star, mut p0, mut q0) = (None, None, None, None);
    if let Some(Initial::PeakonAntipeakon { d: a, t_star: b, p0: c, q0: e }) = from_file.as_ref().map(|c| &c.initial) {
        (d, t_star, p0, q0) = (*a, *b, *c, *e);
    } else if let Some(c) = &from_file {
        bail!("preset {} has no closed form; use peakon_antipeakon", c.preset_name());
    }
    if args.d.is_some() || args.t_star.is_some() || args.p0.is_some() || args.q0.is_some() {
        (d, t_star, p0, q0) = (args.d, args.t_star, args.p0, args.q0);
    }
    if (d, t_star, p0, q0) == (None, None, None, None) {
        (d, t_star) = (Some(1.0), Some(1.0));
    }
    let o = config::oracle_from(d, t_star, p0, q0)?;

    let times = args.times.or_else(|| from_file.as_ref().map(|c| c.output_times())).unwrap_or_else(|| vec![0.0, 0.5, 0.99, 1.5]);
    let x_range = args.x_range.or_else(|| from_file.as_ref().map(|c| c.solver.xi_domain)).unwrap_or([-5.0, 5.0]);
    let nx = args.nx.or_else(|| from_file.as_ref().map(|c| c.solver.n)).unwrap_or(201);
    if nx < 2 || !(x_range[0] < x_range[1]) {
        bail!("the x grid needs at least two nodes on an increasing range");
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        bail!("oracle times must be finite and nonnegative");
    }
    let xs = EulerianState::uniform_grid(x_range[0], x_range[1], nx);

    let params = TableParams { p0: o.p0, q0: o.q0, times: times.clone(), x_range, nx };
    let prov = Provenance::new(sha256_of(&params)?);
    fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    prov.write_text(&args.out.join("oracle.csv"), "#", |w| o.write_csv(w, &times, &xs))?;
    write_plot_script(&args.out, "plot_oracle.py", "oracle.csv", &format!("peakon-antipeakon, D = {}, t* = {}", o.d, o.t_star), &prov)?;
    println!("D = {}, t* = {}, {} rows in {}", o.d, o.t_star, times.len() * xs.len(), args.out.join("oracle.csv").display());
    Ok(Outcome::Pass)
}
