//! Time integration of the Lagrangian system with wave-breaking detection.
//!
//! Primal fields follow `y_t = U`, `U_t = -Q`, `H_t = U³ - 2PU`; the label
//! derivatives follow
//!
//! ```text
//! y_ξ,t = U_ξ
//! U_ξ,t = ½ (V_ξ + (U² - 2P) y_ξ)
//! H_ξ,t = (3U² - 2P) U_ξ - 2 Q U y_ξ
//! ```
//!
//! with `V_ξ = (1 - broken) H_ξ`. A node breaks when `y_ξ` reaches zero;
//! from then on its `y_ξ`, `U_ξ`, `V_ξ` stay zero and `H_ξ` is frozen.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eulerian::{EulerianState, DEFAULT_DECAY_TOL};
use crate::kernel::{exp_scan, quadratic_cell_integral};
use crate::lagrangian::{LagrangianState, ValidationConfig, DEFAULT_C_FLOOR};
use crate::report::{CheckResult, DiagnosticsReport};
use crate::scalar::{lit, median, Scalar};
use crate::transform::{eul_to_lag, lag_to_eul_native};

/// Default breaking threshold relative to the initial median `y_ξ`.
pub const DEFAULT_EPS_BREAK_REL: f64 = 1e-8;

/// Tolerance of the per-snapshot Lagrangian validation.
pub const SNAPSHOT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct SolverConfig<T> {
    pub dt: T,
    pub t_end: T,
    /// Absolute breaking threshold; `None` selects
    /// `DEFAULT_EPS_BREAK_REL · median(y_ξ(0))`.
    #[serde(default)]
    pub eps_break: Option<T>,
    #[serde(default)]
    pub output_times: Vec<T>,
    #[serde(default = "default_c_floor")]
    pub c_floor: T,
}

fn default_c_floor<T: Scalar>() -> T {
    lit(DEFAULT_C_FLOOR)
}

impl<T: Scalar> SolverConfig<T> {
    pub fn new(dt: T, t_end: T, output_times: Vec<T>) -> Self {
        SolverConfig { dt, t_end, eps_break: None, output_times, c_floor: lit(DEFAULT_C_FLOOR) }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return bad("dt must be positive");
        }
        if !(self.t_end > T::zero()) || !self.t_end.is_finite() {
            return bad("t_end must be positive");
        }
        if self.dt >= self.t_end {
            return bad("dt must be smaller than t_end");
        }
        if let Some(e) = self.eps_break {
            if !(e > T::zero()) || !e.is_finite() {
                return bad("eps_break must be positive");
            }
        }
        if !(self.c_floor > T::zero()) {
            return bad("c_floor must be positive");
        }
        if self.output_times.iter().any(|&t| !(t >= T::zero() && t <= self.t_end)) {
            return bad("output times must lie in [0, t_end]");
        }
        if self.output_times.windows(2).any(|w| w[1] <= w[0]) {
            return bad("output times must be strictly increasing");
        }
        Ok(())
    }
}

/// `P` and `Q` at every node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct PQField<T> {
    #[serde(rename = "P")]
    pub p: Vec<T>,
    #[serde(rename = "Q")]
    pub q: Vec<T>,
}

impl<T: Scalar> PQField<T> {
    /// Largest `|Q| - P` (nonpositive when the bound holds) and its node.
    pub fn bound_excess(&self) -> (T, usize) {
        self.p
            .iter()
            .zip(&self.q)
            .map(|(&p, &q)| q.abs() - p)
            .enumerate()
            .fold((T::neg_infinity(), 0), |acc, (j, r)| if r > acc.0 { (r, j) } else { acc })
    }
}

/// `P`, `Q` in O(N) by exponential scans in `y`.
///
/// Per cell, `y` and `U` are linear in the label and the surviving energy
/// [`LagrangianState::cell_ac_energy`] is spread uniformly. The kernel
/// integrals are then exact. Cells where `y` decreases (possible inside an RK stage just
/// before two characteristics meet) count as collapsed.
pub fn compute_pq<T: Scalar>(state: &LagrangianState<T>) -> Result<PQField<T>> {
    let n = state.len();
    let two: T = lit(2.0);
    let mut right = Vec::with_capacity(n - 1);
    let mut left = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        let d = (state.y[k + 1] - state.y[k]).max(T::zero());
        let dxi = state.xi[k + 1] - state.xi[k];
        let ybar = d / dxi;
        let vbar = state.cell_ac_energy(k) / dxi;
        let (ua, ub) = (state.u[k], state.u[k + 1]);
        let du = ub - ua;
        let cr = [ybar * ub * ub + vbar, -two * ybar * ub * du, ybar * du * du];
        let cl = [ybar * ua * ua + vbar, two * ybar * ua * du, ybar * du * du];
        right.push(quadratic_cell_integral(dxi, d, cr).max(T::zero()));
        left.push(quadratic_cell_integral(dxi, d, cl).max(T::zero()));
    }
    let scan = exp_scan(&state.y, &right, &left);
    Ok(PQField { p: scan.symmetric(), q: scan.antisymmetric() })
}

/// Time derivatives of the evolved fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Rates<T> {
    pub y: Vec<T>,
    pub u: Vec<T>,
    pub h: Vec<T>,
    pub y_xi: Vec<T>,
    pub u_xi: Vec<T>,
    pub h_xi: Vec<T>,
}

pub fn rhs<T: Scalar>(state: &LagrangianState<T>, pq: &PQField<T>) -> Rates<T> {
    let n = state.len();
    let two: T = lit(2.0);
    let three: T = lit(3.0);
    let half: T = lit(0.5);
    let mut r = Rates {
        y: state.u.clone(),
        u: pq.q.iter().map(|&q| -q).collect(),
        h: Vec::with_capacity(n),
        y_xi: Vec::with_capacity(n),
        u_xi: Vec::with_capacity(n),
        h_xi: Vec::with_capacity(n),
    };
    for j in 0..n {
        let (u, p, q) = (state.u[j], pq.p[j], pq.q[j]);
        r.h.push(u * u * u - two * p * u);
        if state.broken[j] {
            r.y_xi.push(T::zero());
            r.u_xi.push(T::zero());
            r.h_xi.push(T::zero());
        } else {
            let yx = state.y_xi[j];
            r.y_xi.push(state.u_xi[j]);
            r.u_xi.push(half * (state.v_xi[j] + (u * u - two * p) * yx));
            r.h_xi.push((three * u * u - two * p) * state.u_xi[j] - two * q * u * yx);
        }
    }
    r
}

/// A node that broke during a step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct BreakEvent<T> {
    pub node: usize,
    pub xi: T,
    pub tau: T,
}

fn stage<T: Scalar>(base: &LagrangianState<T>, k: &Rates<T>, c: T) -> LagrangianState<T> {
    let mut s = base.clone();
    let upd = |dst: &mut Vec<T>, src: &[T], rate: &[T]| {
        for ((d, &x), &r) in dst.iter_mut().zip(src).zip(rate) {
            *d = x + c * r;
        }
    };
    upd(&mut s.y, &base.y, &k.y);
    upd(&mut s.u, &base.u, &k.u);
    upd(&mut s.h, &base.h, &k.h);
    upd(&mut s.y_xi, &base.y_xi, &k.y_xi);
    upd(&mut s.u_xi, &base.u_xi, &k.u_xi);
    upd(&mut s.h_xi, &base.h_xi, &k.h_xi);
    for j in 0..s.len() {
        s.y_xi[j] = s.y_xi[j].max(T::zero());
        s.v_xi[j] = if s.broken[j] { T::zero() } else { s.h_xi[j] };
    }
    s
}

/// Minimum over `(0, 1)` of the cubic Hermite interpolant with end values
/// `y0`, `y1` and end slopes `m0`, `m1`, with its location.
fn hermite_min<T: Scalar>(y0: T, y1: T, m0: T, m1: T) -> Option<(T, T)> {
    let (two, three, four, six): (T, T, T, T) = (lit(2.0), lit(3.0), lit(4.0), lit(6.0));
    let a = six * y0 + three * m0 - six * y1 + three * m1;
    let b = -six * y0 - four * m0 + six * y1 - two * m1;
    let c = m0;
    let eval = |s: T| {
        let s2 = s * s;
        let s3 = s2 * s;
        (two * s3 - three * s2 + T::one()) * y0
            + (s3 - two * s2 + s) * m0
            + (-two * s3 + three * s2) * y1
            + (s3 - s2) * m1
    };
    let mut roots = Vec::with_capacity(2);
    if a.abs() <= T::epsilon() * (b.abs() + c.abs()) {
        if b != T::zero() {
            roots.push(-c / b);
        }
    } else {
        let disc = b * b - four * a * c;
        if disc >= T::zero() {
            let sq = disc.sqrt();
            // Numerically stable pair of roots.
            let qq = -(b + b.signum() * sq) / two;
            if qq != T::zero() {
                roots.push(c / qq);
            }
            roots.push(qq / a);
        }
    }
    roots
        .into_iter()
        .filter(|&s| s > T::zero() && s < T::one() && (two * a * s + b) >= T::zero())
        .map(|s| (eval(s), s))
        .fold(None, |acc: Option<(T, T)>, v| match acc {
            Some(best) if best.0 <= v.0 => Some(best),
            _ => Some(v),
        })
}

/// Runs of at least two consecutive broken nodes share one position and
/// velocity: both `y_ξ` and `U_ξ` vanish along them.
fn collapse_broken_runs<T: Scalar>(s: &mut LagrangianState<T>) {
    let n = s.len();
    let mut j = 0;
    while j < n {
        if !s.broken[j] {
            j += 1;
            continue;
        }
        let mut last = j;
        while last + 1 < n && s.broken[last + 1] {
            last += 1;
        }
        if last > j {
            let count: T = lit((last - j + 1) as f64);
            let ym = s.y[j..=last].iter().copied().sum::<T>() / count;
            let um = s.u[j..=last].iter().copied().sum::<T>() / count;
            for i in j..=last {
                s.y[i] = ym;
                s.u[i] = um;
            }
        }
        j = last + 1;
    }
}

fn check_finite<T: Scalar>(s: &LagrangianState<T>, t: T) -> Result<()> {
    let fields: [(&str, &Vec<T>); 7] = [
        ("y", &s.y),
        ("U", &s.u),
        ("H", &s.h),
        ("y_xi", &s.y_xi),
        ("U_xi", &s.u_xi),
        ("H_xi", &s.h_xi),
        ("V", &s.v),
    ];
    for (name, f) in fields {
        if let Some(j) = f.iter().position(|v| !v.is_finite()) {
            return Err(Error::BlowUp { t: t.to_f64_lossy(), what: format!("non-finite {name} at node {j}") });
        }
    }
    Ok(())
}

/// One classical RK4 step from `t` to `t + dt`, followed by breaking
/// detection and the freeze rule.
///
/// A node breaks when `y_ξ` ends the step at or below `eps_break` (with `τ`
/// from the linear zero crossing), or when `U_ξ` changes sign from negative
/// to nonnegative and the cubic Hermite interpolant of `y_ξ` over the step
/// dips to `eps_break` or below (with `τ` at its minimum). Both ends of a
/// cell whose characteristics cross during the step break as well.
pub fn step<T: Scalar>(
    state: &LagrangianState<T>,
    t: T,
    dt: T,
    eps_break: T,
) -> Result<(LagrangianState<T>, Vec<BreakEvent<T>>)> {
    let half: T = lit(0.5);
    let sixth: T = lit(1.0 / 6.0);
    let two: T = lit(2.0);
    let k1 = rhs(state, &compute_pq(state)?);
    let s2 = stage(state, &k1, half * dt);
    let k2 = rhs(&s2, &compute_pq(&s2)?);
    let s3 = stage(state, &k2, half * dt);
    let k3 = rhs(&s3, &compute_pq(&s3)?);
    let s4 = stage(state, &k3, dt);
    let k4 = rhs(&s4, &compute_pq(&s4)?);

    let mut next = state.clone();
    let combine = |dst: &mut Vec<T>, src: &[T], a: &[T], b: &[T], c: &[T], d: &[T]| {
        for j in 0..src.len() {
            dst[j] = src[j] + dt * sixth * (a[j] + two * b[j] + two * c[j] + d[j]);
        }
    };
    combine(&mut next.y, &state.y, &k1.y, &k2.y, &k3.y, &k4.y);
    combine(&mut next.u, &state.u, &k1.u, &k2.u, &k3.u, &k4.u);
    combine(&mut next.h, &state.h, &k1.h, &k2.h, &k3.h, &k4.h);
    combine(&mut next.y_xi, &state.y_xi, &k1.y_xi, &k2.y_xi, &k3.y_xi, &k4.y_xi);
    combine(&mut next.u_xi, &state.u_xi, &k1.u_xi, &k2.u_xi, &k3.u_xi, &k4.u_xi);
    combine(&mut next.h_xi, &state.h_xi, &k1.h_xi, &k2.h_xi, &k3.h_xi, &k4.h_xi);

    let mut events = Vec::new();
    for j in 0..next.len() {
        if state.broken[j] {
            continue;
        }
        let (y0, y1) = (state.y_xi[j], next.y_xi[j]);
        let tau = if y1 <= eps_break {
            let w = if y0 > y1 { ((y0 - eps_break.min(y0)) / (y0 - y1)).min(T::one()) } else { T::one() };
            Some(t + w * dt)
        } else if state.u_xi[j] < T::zero() && next.u_xi[j] >= T::zero() {
            hermite_min(y0, y1, dt * state.u_xi[j], dt * next.u_xi[j])
                .filter(|&(m, _)| m <= eps_break)
                .map(|(_, s)| t + s * dt)
        } else {
            None
        };
        if let Some(tau) = tau {
            next.broken[j] = true;
            next.tau[j] = tau;
            next.y_xi[j] = T::zero();
            next.u_xi[j] = T::zero();
            events.push(BreakEvent { node: j, xi: next.xi[j], tau });
        }
    }
    // Neighbours whose characteristics crossed enclosed a cell that
    // collapsed inside the step; both ends break at the linear crossing time.
    for k in 0..next.len() - 1 {
        let (d0, d1) = (state.y[k + 1] - state.y[k], next.y[k + 1] - next.y[k]);
        if d1 >= T::zero() {
            continue;
        }
        let w = if d0 > T::zero() { d0 / (d0 - d1) } else { T::zero() };
        for j in [k, k + 1] {
            if !next.broken[j] {
                next.broken[j] = true;
                next.tau[j] = t + w * dt;
                events.push(BreakEvent { node: j, xi: next.xi[j], tau: next.tau[j] });
            }
        }
    }
    events.sort_by_key(|e| e.node);
    for j in 0..next.len() {
        if next.broken[j] {
            next.y_xi[j] = T::zero();
            next.u_xi[j] = T::zero();
            next.v_xi[j] = T::zero();
        } else {
            next.v_xi[j] = next.h_xi[j];
        }
    }
    collapse_broken_runs(&mut next);
    next.rebuild_v();
    check_finite(&next, t + dt)?;
    Ok((next, events))
}

/// One output time of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Snapshot<T> {
    pub t: T,
    pub eulerian: EulerianState<T>,
    pub lagrangian: LagrangianState<T>,
    pub pq: PQField<T>,
    pub report: DiagnosticsReport<T>,
}

impl<T: Scalar> Snapshot<T> {
    pub fn new(t: T, lagrangian: LagrangianState<T>, c_floor: T) -> Result<Self> {
        let eulerian = lag_to_eul_native(&lagrangian)?;
        let pq = compute_pq(&lagrangian)?;
        let mut vc = ValidationConfig::new(lit(SNAPSHOT_TOL));
        vc.c_floor = c_floor;
        let mut report = DiagnosticsReport::new();
        report.merge_prefixed("lagrangian.", lagrangian.validate_with(&vc)?);
        let (excess, j) = pq.bound_excess();
        report.insert(
            "pq_bound",
            CheckResult::from_residual(excess.max(T::zero()), T::zero()).at(Some(t), Some(lagrangian.xi[j])),
        );
        Ok(Snapshot { t, eulerian, lagrangian, pq, report })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Trajectory<T> {
    pub config: SolverConfig<T>,
    /// Breaking threshold actually used.
    pub eps_break: T,
    pub snapshots: Vec<Snapshot<T>>,
    pub events: Vec<BreakEvent<T>>,
    pub final_time: T,
    pub final_state: LagrangianState<T>,
    pub steps: usize,
}

impl<T: Scalar> Trajectory<T> {
    pub fn snapshot_at(&self, t: T) -> Option<&Snapshot<T>> {
        self.snapshots.iter().find(|s| (s.t - t).abs() <= lit::<T>(1e-9) * (T::one() + t.abs()))
    }
}

/// `L`, then [`solve_from`] at `t = 0`.
pub fn solve<T: Scalar>(initial: &EulerianState<T>, config: &SolverConfig<T>) -> Result<Trajectory<T>> {
    config.validate()?;
    initial.check_decay(lit(DEFAULT_DECAY_TOL))?;
    let x0 = eul_to_lag(initial)?;
    solve_from(x0, T::zero(), config)
}

/// Integrates a Lagrangian state from `t0` to `config.t_end`, emitting a
/// snapshot at each output time `>= t0`. Steps are shortened so that every
/// output time is hit exactly.
pub fn solve_from<T: Scalar>(state: LagrangianState<T>, t0: T, config: &SolverConfig<T>) -> Result<Trajectory<T>> {
    config.validate()?;
    state.check_structure()?;
    if !(t0 >= T::zero()) || t0 > config.t_end {
        return Err(Error::Config("start time must lie in [0, t_end]".into()));
    }
    let eps_break = match config.eps_break {
        Some(e) => e,
        None => {
            let m = median(state.y_xi.iter().copied().filter(|v| *v > T::zero())).unwrap_or(T::one());
            m * lit(DEFAULT_EPS_BREAK_REL)
        }
    };
    let mut stops: Vec<T> = config.output_times.iter().copied().filter(|&t| t > t0).collect();
    if stops.last().is_none_or(|&l| l < config.t_end) {
        stops.push(config.t_end);
    }
    let is_output = |t: T| config.output_times.contains(&t);

    let mut snapshots = Vec::new();
    if is_output(t0) {
        snapshots.push(Snapshot::new(t0, state.clone(), config.c_floor)?);
    }
    let mut events = Vec::new();
    let mut x = state;
    let mut t = t0;
    let mut steps = 0usize;
    for stop in stops {
        let span = stop - t;
        let n = (span / config.dt - lit(1e-9)).ceil().max(T::one());
        let count = n.to_usize().unwrap_or(1);
        let h = span / n;
        for i in 0..count {
            let t_next = if i + 1 == count { stop } else { t + h };
            let (nx, ev) = step(&x, t, t_next - t, eps_break)?;
            x = nx;
            events.extend(ev);
            t = t_next;
            steps += 1;
        }
        t = stop;
        if is_output(stop) {
            snapshots.push(Snapshot::new(stop, x.clone(), config.c_floor)?);
        }
    }
    Ok(Trajectory {
        config: config.clone(),
        eps_break,
        snapshots,
        events,
        final_time: t,
        final_state: x,
        steps,
    })
}

/// `(ξ, τ(ξ))` per node of the final state; `τ = +∞` where no break occurred.
pub fn breaking_profile<T: Scalar>(traj: &Trajectory<T>) -> Vec<(T, T)> {
    let s = &traj.final_state;
    s.xi.iter().copied().zip(s.tau.iter().copied()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eulerian::Atom;

    fn peakon(n: usize) -> EulerianState<f64> {
        let x = EulerianState::uniform_grid(-20.0, 20.0, n);
        EulerianState::from_fn(x, |x: f64| (-x.abs()).exp(), vec![]).unwrap()
    }

    #[test]
    fn config_validation_messages() {
        let mut c = SolverConfig::new(0.0, 1.0, vec![]);
        assert_eq!(c.validate().unwrap_err().to_string(), "dt must be positive");
        c.dt = -1.0;
        assert_eq!(c.validate().unwrap_err().to_string(), "dt must be positive");
        c.dt = 2.0;
        assert!(c.validate().is_err());
        c.dt = 0.1;
        c.output_times = vec![0.5, 2.0];
        assert!(c.validate().is_err());
        c.output_times = vec![0.5, 0.2];
        assert!(c.validate().is_err());
        c.output_times = vec![0.0, 1.0];
        c.eps_break = Some(0.0);
        assert!(c.validate().is_err());
        c.eps_break = None;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn zero_state_has_zero_pressure_and_rates() {
        let l = LagrangianState::trivial(EulerianState::uniform_grid(-3.0, 3.0, 31)).unwrap();
        let pq = compute_pq(&l).unwrap();
        assert!(pq.p.iter().chain(&pq.q).all(|&v| v == 0.0));
        let r = rhs(&l, &pq);
        for f in [&r.y, &r.u, &r.h, &r.y_xi, &r.u_xi, &r.h_xi] {
            assert!(f.iter().all(|&v| v == 0.0));
        }
        let (next, ev) = step(&l, 0.0, 0.01, 1e-8).unwrap();
        assert_eq!(next, l);
        assert!(ev.is_empty());
    }

    #[test]
    fn peakon_pressure_at_crest() {
        let l = eul_to_lag(&peakon(4001)).unwrap();
        let pq = compute_pq(&l).unwrap();
        let j = l.y.iter().position(|&y| y == 0.0).unwrap();
        assert!((pq.p[j] - 0.5).abs() < 1e-4, "{}", pq.p[j]);
        assert!(pq.q[j].abs() < 1e-12);
        let r = rhs(&l, &pq);
        assert_eq!(r.y[j], 1.0);
        assert!(pq.p.iter().zip(&pq.q).all(|(p, q)| q.abs() <= *p));
    }

    #[test]
    fn broken_nodes_have_frozen_derivatives() {
        let x = EulerianState::uniform_grid(-5.0, 5.0, 101);
        let s = EulerianState::from_fn(x, |x: f64| (-x * x).exp(), vec![Atom::new(0.0, 1.0)]).unwrap();
        let l = eul_to_lag(&s).unwrap();
        let r = rhs(&l, &compute_pq(&l).unwrap());
        for j in (0..l.len()).filter(|&j| l.broken[j]) {
            assert_eq!((r.y_xi[j], r.u_xi[j], r.h_xi[j]), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn hermite_minimum_of_a_touching_parabola() {
        // y(s) = (s - 0.4)², y' = 2(s - 0.4).
        let (m, s) = hermite_min(0.16f64, 0.36, -0.8, 1.2).unwrap();
        assert!(m.abs() < 1e-15 && (s - 0.4).abs() < 1e-14);
        assert!(hermite_min(1.0, 2.0, 1.0, 1.0).is_none());
    }

    #[test]
    fn single_peakon_step_does_not_break() {
        let l = eul_to_lag(&peakon(2001)).unwrap();
        let (next, ev) = step(&l, 0.0, 1e-3, 1e-9).unwrap();
        assert!(ev.is_empty());
        let worst = (0..next.len()).map(|j| next.c2_residual(j)).fold(0.0, f64::max);
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn output_times_are_hit_exactly() {
        let s = EulerianState::zero(EulerianState::uniform_grid(-2.0, 2.0, 21)).unwrap();
        let c = SolverConfig::new(0.03, 0.1, vec![0.0, 0.05, 0.1]);
        let tr = solve(&s, &c).unwrap();
        let ts: Vec<f64> = tr.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(ts, vec![0.0, 0.05, 0.1]);
        assert_eq!(tr.steps, 4);
        assert!(tr.snapshots.iter().all(|s| s.eulerian.u().iter().all(|&u| u == 0.0)));
    }
}
