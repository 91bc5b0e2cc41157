//! Trajectory-level checks of the dissipative-solution constraints and the
//! Lagrangian invariants. Every check is a pure function of the snapshots.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::eulerian::{Atom, EulerianState};
use crate::evolution::{solve, Snapshot, SolverConfig};
use crate::report::{CheckResult, DiagnosticsReport};
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct DiagnosticsConfig<T> {
    /// Snapshots before this time are skipped by the slope bound.
    pub lipschitz_t_min: T,
    pub lipschitz_margin: T,
    /// Run-level one-sided bound `u_x <= D`, if known.
    pub run_level_d: Option<T>,
    /// Allowed growth of `F(t, +∞)` per time step.
    pub energy_step_tol: T,
    /// Relative tolerance on `ν(ℝ)`.
    pub nu_rel_tol: T,
    pub c2_tol: T,
    pub riccati_margin: T,
    /// Constant in `|u(t₂,x) - u(t₁,x)| <= K √|t₂ - t₁|`; `None` uses
    /// `2 (1 + ν(ℝ))`.
    pub holder_time_constant: Option<T>,
    pub holder_margin: T,
    pub tv_bound: Option<T>,
    /// Require at most one jump of `P` along the tracked characteristic.
    pub expect_single_jump: bool,
    /// A change of `P` between snapshots counts as a jump above this
    /// fraction of `max P`.
    pub jump_fraction: T,
}

impl<T: Scalar> Default for DiagnosticsConfig<T> {
    fn default() -> Self {
        DiagnosticsConfig {
            lipschitz_t_min: lit(0.1),
            lipschitz_margin: lit(0.1),
            run_level_d: None,
            energy_step_tol: lit(1e-6),
            nu_rel_tol: lit(1e-4),
            c2_tol: lit(1e-6),
            riccati_margin: lit(0.1),
            holder_time_constant: None,
            holder_margin: lit(1e-9),
            tv_bound: None,
            expect_single_jump: false,
            jump_fraction: lit(0.25),
        }
    }
}

fn pos<T: Scalar>(v: T) -> T {
    v.max(T::zero())
}

/// Keeps the worst `(residual, t, coordinate)`.
struct Worst<T> {
    r: T,
    t: Option<T>,
    x: Option<T>,
}

impl<T: Scalar> Worst<T> {
    fn new() -> Self {
        Worst { r: T::zero(), t: None, x: None }
    }

    fn offer(&mut self, r: T, t: T, x: Option<T>) {
        if r > self.r || (r.is_nan() && !self.r.is_nan()) {
            self.r = r;
            self.t = Some(t);
            self.x = x;
        }
    }

    fn result(self, tol: T) -> CheckResult<T> {
        CheckResult::from_residual(self.r, tol).at(self.t, self.x)
    }
}

/// `max u_x` per snapshot against `D` (when given) and `2/t + √2 ‖u₀‖`,
/// for `t >= t_min`. The residual is the largest excess over the bounds.
pub fn check_one_sided_lipschitz<T: Scalar>(
    snaps: &[Snapshot<T>],
    h1_u0: T,
    cfg: &DiagnosticsConfig<T>,
) -> CheckResult<T> {
    let mut w = Worst::new();
    for s in snaps.iter().filter(|s| s.t >= cfg.lipschitz_t_min && s.t > T::zero()) {
        let (slope, k) = s.eulerian.max_forward_slope();
        let x = s.eulerian.x()[k];
        let apriori = lit::<T>(2.0) / s.t + lit::<T>(2.0).sqrt() * h1_u0;
        w.offer(slope - apriori, s.t, Some(x));
        if let Some(d) = cfg.run_level_d {
            w.offer(slope - d, s.t, Some(x));
        }
    }
    w.result(cfg.lipschitz_margin)
}

/// Steps between consecutive output times for a fixed `dt`.
fn steps_between<T: Scalar>(a: T, b: T, dt: T) -> T {
    ((b - a) / dt - lit(1e-9)).ceil().max(T::one())
}

/// `F(t, +∞)` non-increasing (per step tolerance) and `ν(ℝ)` constant.
pub fn check_energy<T: Scalar>(snaps: &[Snapshot<T>], dt: T, cfg: &DiagnosticsConfig<T>) -> DiagnosticsReport<T> {
    let mut report = DiagnosticsReport::new();
    let mut w = Worst::new();
    for p in snaps.windows(2) {
        let rise = p[1].eulerian.energy() - p[0].eulerian.energy();
        w.offer(rise / steps_between(p[0].t, p[1].t, dt), p[1].t, None);
    }
    report.insert("energy_nonincreasing", w.result(cfg.energy_step_tol));
    let mut w = Worst::new();
    if let Some(first) = snaps.first() {
        let nu0 = first.eulerian.nu_total();
        let scale = if nu0 > T::zero() { nu0 } else { T::one() };
        for s in snaps {
            w.offer((s.eulerian.nu_total() - nu0).abs() / scale, s.t, None);
        }
    }
    report.insert("nu_conservation", w.result(cfg.nu_rel_tol));
    report
}

/// Number of consecutive changes larger than `threshold`.
pub fn count_jumps<T: Scalar>(values: &[T], threshold: T) -> usize {
    values.windows(2).filter(|w| (w[1] - w[0]).abs() > threshold).count()
}

/// Total variation of `P(t, ξ_node)` over the snapshots.
pub fn tv_along_characteristic<T: Scalar>(snaps: &[Snapshot<T>], node: usize) -> (T, Vec<T>) {
    let series: Vec<T> = snaps.iter().filter_map(|s| s.pq.p.get(node).copied()).collect();
    let tv = series.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    (tv, series)
}

/// Bounded variation of `P` along one characteristic. Without a configured
/// bound the check only requires a finite value.
pub fn check_tv_p_along_characteristic<T: Scalar>(
    snaps: &[Snapshot<T>],
    node: usize,
    bound: Option<T>,
) -> CheckResult<T> {
    let (tv, _) = tv_along_characteristic(snaps, node);
    let xi = snaps.first().and_then(|s| s.lagrangian.xi.get(node).copied());
    let tol = bound.unwrap_or_else(T::max_value);
    CheckResult::from_residual(tv, tol).at(None, xi)
}

/// Worst normalized `|U²y_ξ² + U_ξ² - y_ξV_ξ|` over unbroken nodes.
pub fn check_c2_identity<T: Scalar>(snaps: &[Snapshot<T>], tol: T) -> CheckResult<T> {
    let mut w = Worst::new();
    for s in snaps {
        let l = &s.lagrangian;
        for j in (0..l.len()).filter(|&j| !l.broken[j]) {
            w.offer(l.c2_residual(j), s.t, Some(l.xi[j]));
        }
    }
    w.result(tol)
}

/// Number of nodes that were broken at one snapshot and not at a later one,
/// or whose breaking time changed.
pub fn check_broken_monotone<T: Scalar>(snaps: &[Snapshot<T>]) -> CheckResult<T> {
    let mut w = Worst::new();
    for p in snaps.windows(2) {
        let (a, b) = (&p[0].lagrangian, &p[1].lagrangian);
        let bad = (0..a.len().min(b.len()))
            .filter(|&j| a.broken[j] && (!b.broken[j] || a.tau[j] != b.tau[j]))
            .count();
        let first = (0..a.len().min(b.len())).find(|&j| a.broken[j] && (!b.broken[j] || a.tau[j] != b.tau[j]));
        w.offer(lit(bad as f64), p[1].t, first.map(|j| a.xi[j]));
    }
    w.result(T::zero())
}

/// `|Q| <= P` at every node of every snapshot.
pub fn check_pq_bound<T: Scalar>(snaps: &[Snapshot<T>]) -> CheckResult<T> {
    let mut w = Worst::new();
    for s in snaps {
        let (excess, j) = s.pq.bound_excess();
        w.offer(pos(excess), s.t, s.lagrangian.xi.get(j).copied());
    }
    w.result(T::zero())
}

/// `α = U_ξ / y_ξ` over unbroken nodes.
fn alpha_max<T: Scalar>(s: &Snapshot<T>) -> (T, Option<T>) {
    let l = &s.lagrangian;
    (0..l.len())
        .filter(|&j| !l.broken[j] && l.y_xi[j] > T::zero())
        .map(|j| (l.u_xi[j] / l.y_xi[j], l.xi[j]))
        .fold((T::neg_infinity(), None), |acc, (a, x)| if a > acc.0 { (a, Some(x)) } else { acc })
}

/// `α(t) <= max(α(0), 2√C)` with `C = ν(ℝ)` at the first snapshot.
pub fn check_riccati<T: Scalar>(snaps: &[Snapshot<T>], margin: T) -> CheckResult<T> {
    let mut w = Worst::new();
    let Some(first) = snaps.first() else {
        return w.result(margin);
    };
    let c = first.eulerian.nu_total();
    let bound = alpha_max(first).0.max(lit::<T>(2.0) * c.sqrt());
    for s in snaps {
        let (a, x) = alpha_max(s);
        w.offer(a - bound, s.t, x);
    }
    w.result(margin)
}

/// Discrete half-Hölder quotients: in space against `√ν(ℝ)` at the first
/// snapshot (`|u(x) - u(z)| <= ‖u_x‖₂ √|x - z|`), and in time between
/// consecutive snapshots against a configured constant.
pub fn check_holder<T: Scalar>(snaps: &[Snapshot<T>], cfg: &DiagnosticsConfig<T>) -> DiagnosticsReport<T> {
    let mut report = DiagnosticsReport::new();
    let mut w = Worst::new();
    let bound = snaps.first().map_or(T::zero(), |s| s.eulerian.nu_total()).sqrt();
    for s in snaps {
        let e = &s.eulerian;
        for k in 0..e.len() - 1 {
            let q = (e.u()[k + 1] - e.u()[k]).abs() / (e.x()[k + 1] - e.x()[k]).sqrt();
            w.offer(q - bound, s.t, Some(e.x()[k]));
        }
    }
    report.insert("holder_space", w.result(cfg.holder_margin));
    let mut w = Worst::new();
    let c = snaps.first().map_or(T::zero(), |s| s.eulerian.nu_total());
    let k = cfg.holder_time_constant.unwrap_or(lit::<T>(2.0) * (T::one() + c));
    for p in snaps.windows(2) {
        let dt = (p[1].t - p[0].t).sqrt();
        for &x in p[0].eulerian.x().iter().chain(p[1].eulerian.x()) {
            let du = (p[1].eulerian.eval_u(x) - p[0].eulerian.eval_u(x)).abs();
            w.offer(du / dt - k, p[1].t, Some(x));
        }
    }
    report.insert("holder_time", w.result(T::zero()));
    report
}

/// Time-Lipschitz proxy for the weak continuity of `t ↦ ν(t)`: for Gaussian
/// bumps `φ` of unit width, `|d/dt ∫φ dν| <= 4 ‖φ'‖∞ C^{3/2}`.
pub fn check_nu_weak_continuity<T: Scalar>(snaps: &[Snapshot<T>], centers: &[T]) -> CheckResult<T> {
    let mut w = Worst::new();
    let Some(first) = snaps.first() else {
        return w.result(T::zero());
    };
    let c = first.eulerian.nu_total();
    let dphi: T = (lit::<T>(-0.5)).exp(); // max |φ'| for φ(x) = e^{-x²/2}
    let rate = lit::<T>(4.0) * dphi * c * c.sqrt();
    let moments = |s: &Snapshot<T>| -> Vec<T> {
        centers
            .iter()
            .map(|&c0| s.eulerian.integrate_against(|x| (-(x - c0) * (x - c0) / lit(2.0)).exp()))
            .collect()
    };
    let mut prev = moments(first);
    for p in snaps.windows(2) {
        let cur = moments(&p[1]);
        let dt = p[1].t - p[0].t;
        for (i, (&a, &b)) in prev.iter().zip(&cur).enumerate() {
            w.offer((b - a).abs() / dt - rate, p[1].t, Some(centers[i]));
        }
        prev = cur;
    }
    // The bound is met when the worst excess is nonpositive.
    w.result(lit(1e-12))
}

/// `P` along the tracked characteristic jumps at most once.
pub fn check_single_jump<T: Scalar>(snaps: &[Snapshot<T>], node: usize, fraction: T) -> CheckResult<T> {
    let (_, series) = tv_along_characteristic(snaps, node);
    let pmax = series.iter().fold(T::zero(), |m, &v| m.max(v));
    let jumps = count_jumps(&series, fraction * pmax);
    let xi = snaps.first().and_then(|s| s.lagrangian.xi.get(node).copied());
    CheckResult::from_residual(lit(jumps as f64), T::one()).at(None, xi)
}

/// Runs the solver with and without `atoms` added to `u0` and compares `u`
/// at each common output time on `u0`'s grid.
pub fn check_nu_independence<T: Scalar>(
    u0: &EulerianState<T>,
    atoms: &[Atom<T>],
    config: &SolverConfig<T>,
    tol: T,
) -> Result<CheckResult<T>> {
    let base = u0.with_atoms(Vec::new())?;
    let with = u0.with_atoms(atoms.to_vec())?;
    let a = solve(&base, config)?;
    let b = solve(&with, config)?;
    Ok(compare_u(&a.snapshots, &b.snapshots, u0.x(), tol))
}

/// Sup difference of `u` between two snapshot sequences on `grid`.
pub fn compare_u<T: Scalar>(a: &[Snapshot<T>], b: &[Snapshot<T>], grid: &[T], tol: T) -> CheckResult<T> {
    let mut w = Worst::new();
    for (sa, sb) in a.iter().zip(b) {
        for &x in grid {
            w.offer((sa.eulerian.eval_u(x) - sb.eulerian.eval_u(x)).abs(), sa.t, Some(x));
        }
    }
    w.result(tol)
}

/// Node whose initial position is closest to `x`.
pub fn node_nearest<T: Scalar>(snaps: &[Snapshot<T>], x: T) -> usize {
    snaps.first().map_or(0, |s| {
        s.lagrangian
            .y
            .iter()
            .enumerate()
            .fold((0, T::infinity()), |acc, (j, &y)| if (y - x).abs() < acc.1 { (j, (y - x).abs()) } else { acc })
            .0
    })
}

/// Every trajectory check, under fixed names.
pub fn run_all<T: Scalar>(snaps: &[Snapshot<T>], dt: T, cfg: &DiagnosticsConfig<T>) -> DiagnosticsReport<T> {
    let mut report = DiagnosticsReport::new();
    let h1 = snaps.first().map_or(T::zero(), |s| s.eulerian.h1_norm());
    report.insert("one_sided_lipschitz", check_one_sided_lipschitz(snaps, h1, cfg));
    for (k, v) in check_energy(snaps, dt, cfg).checks {
        report.insert(&k, v);
    }
    let node = node_nearest(snaps, T::zero());
    report.insert("tv_p_along_characteristic", check_tv_p_along_characteristic(snaps, node, cfg.tv_bound));
    if cfg.expect_single_jump {
        report.insert("p_single_jump", check_single_jump(snaps, node, cfg.jump_fraction));
    }
    report.insert("c2_identity", check_c2_identity(snaps, cfg.c2_tol));
    report.insert("broken_monotone", check_broken_monotone(snaps));
    report.insert("pq_bound", check_pq_bound(snaps));
    report.insert("riccati", check_riccati(snaps, cfg.riccati_margin));
    for (k, v) in check_holder(snaps, cfg).checks {
        report.insert(&k, v);
    }
    let centers: Vec<T> = (-4..=4).map(|i| lit(2.0 * i as f64)).collect();
    report.insert("nu_weak_continuity", check_nu_weak_continuity(snaps, &centers));
    report
}
