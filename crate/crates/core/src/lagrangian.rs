//! Lagrangian quadruples `(y, U, V, H)` on a label grid, with independently
//! stored nodal derivatives, breaking times and relabeling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{CheckResult, DiagnosticsReport};
use crate::scalar::{lit, locate, nodal_derivative, Scalar};

/// Default lower bound `c` in `y_ξ + H_ξ >= c`.
pub const DEFAULT_C_FLOOR: f64 = 1e-10;
/// Default slope bound `c` for relabeling functions (`1/c <= f_ξ <= c`).
pub const DEFAULT_SLOPE_BOUND: f64 = 1e3;
/// Boundary-decay threshold for `|U|` at the two end nodes.
pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-6;

mod tau_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::scalar::Scalar;

    pub fn serialize<S: Serializer, T: Scalar>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
        let opt: Vec<Option<T>> = v.iter().map(|&t| if t.is_finite() { Some(t) } else { None }).collect();
        opt.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, T: Scalar>(d: D) -> Result<Vec<T>, D::Error> {
        let opt: Vec<Option<T>> = Vec::deserialize(d)?;
        Ok(opt.into_iter().map(|t| t.unwrap_or_else(T::infinity)).collect())
    }
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
struct RawLagrangian<T> {
    xi: Vec<T>,
    y: Vec<T>,
    #[serde(rename = "U")]
    u: Vec<T>,
    #[serde(rename = "V")]
    v: Vec<T>,
    #[serde(rename = "H")]
    h: Vec<T>,
    y_xi: Vec<T>,
    #[serde(rename = "U_xi")]
    u_xi: Vec<T>,
    #[serde(rename = "V_xi")]
    v_xi: Vec<T>,
    #[serde(rename = "H_xi")]
    h_xi: Vec<T>,
    #[serde(with = "tau_serde")]
    tau: Vec<T>,
    #[serde(default)]
    broken: Option<Vec<bool>>,
}

impl<T: Scalar> TryFrom<RawLagrangian<T>> for LagrangianState<T> {
    type Error = Error;
    fn try_from(r: RawLagrangian<T>) -> Result<Self> {
        let broken = r.broken.unwrap_or_else(|| r.tau.iter().map(|t| t.is_finite()).collect());
        let s = LagrangianState {
            xi: r.xi,
            y: r.y,
            u: r.u,
            v: r.v,
            h: r.h,
            y_xi: r.y_xi,
            u_xi: r.u_xi,
            v_xi: r.v_xi,
            h_xi: r.h_xi,
            tau: r.tau,
            broken,
        };
        s.check_structure()?;
        Ok(s)
    }
}

/// Nodal Lagrangian data. `tau[j]` is `+∞` until node `j` breaks; in JSON it
/// is written as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLagrangian<T>")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct LagrangianState<T> {
    /// Particle labels, strictly increasing.
    pub xi: Vec<T>,
    /// Characteristic positions.
    pub y: Vec<T>,
    #[serde(rename = "U")]
    pub u: Vec<T>,
    /// Cumulative surviving energy.
    #[serde(rename = "V")]
    pub v: Vec<T>,
    /// Cumulative total energy.
    #[serde(rename = "H")]
    pub h: Vec<T>,
    pub y_xi: Vec<T>,
    #[serde(rename = "U_xi")]
    pub u_xi: Vec<T>,
    #[serde(rename = "V_xi")]
    pub v_xi: Vec<T>,
    #[serde(rename = "H_xi")]
    pub h_xi: Vec<T>,
    #[serde(with = "tau_serde")]
    pub tau: Vec<T>,
    pub broken: Vec<bool>,
}

/// Every field of a state evaluated at one label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSample<T> {
    pub y: T,
    pub u: T,
    pub v: T,
    pub h: T,
    pub y_xi: T,
    pub u_xi: T,
    pub v_xi: T,
    pub h_xi: T,
    pub tau: T,
    pub broken: bool,
}

/// Tolerances for [`LagrangianState::validate_with`].
#[derive(Debug, Clone, Copy)]
pub struct ValidationConfig<T> {
    pub tol: T,
    pub c_floor: T,
    pub boundary_tol: T,
}

impl<T: Scalar> ValidationConfig<T> {
    pub fn new(tol: T) -> Self {
        ValidationConfig { tol, c_floor: lit(DEFAULT_C_FLOOR), boundary_tol: lit(DEFAULT_BOUNDARY_TOL) }
    }
}

impl<T: Scalar> LagrangianState<T> {
    /// The image of `u ≡ 0, ν = 0`: `y = ξ`, everything else zero.
    pub fn trivial(xi: Vec<T>) -> Result<Self> {
        let n = xi.len();
        let z = vec![T::zero(); n];
        let s = LagrangianState {
            y: xi.clone(),
            xi,
            u: z.clone(),
            v: z.clone(),
            h: z.clone(),
            y_xi: vec![T::one(); n],
            u_xi: z.clone(),
            v_xi: z.clone(),
            h_xi: z,
            tau: vec![T::infinity(); n],
            broken: vec![false; n],
        };
        s.check_structure()?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// Lengths agree, labels strictly increasing, all fields finite.
    pub fn check_structure(&self) -> Result<()> {
        let n = self.xi.len();
        let bad = |m: String| Err(Error::InvalidLagrangian(m));
        if n < 2 {
            return bad("need at least two nodes".into());
        }
        let fields: [(&str, &Vec<T>); 9] = [
            ("y", &self.y),
            ("U", &self.u),
            ("V", &self.v),
            ("H", &self.h),
            ("y_xi", &self.y_xi),
            ("U_xi", &self.u_xi),
            ("V_xi", &self.v_xi),
            ("H_xi", &self.h_xi),
            ("tau", &self.tau),
        ];
        for (name, f) in fields {
            if f.len() != n {
                return bad(format!("field {name} has length {} (expected {n})", f.len()));
            }
            if name != "tau" && f.iter().any(|v| !v.is_finite()) {
                return bad(format!("field {name} has a non-finite entry"));
            }
        }
        if self.broken.len() != n {
            return bad("broken flags have the wrong length".into());
        }
        if self.xi.iter().any(|v| !v.is_finite()) || self.xi.windows(2).any(|w| w[1] <= w[0]) {
            return bad("labels must be finite and strictly increasing".into());
        }
        if self.tau.iter().any(|t| t.is_nan() || *t < T::zero()) {
            return bad("breaking times must be nonnegative".into());
        }
        Ok(())
    }

    /// Absolutely continuous energy of cell `k`. Cells with both ends
    /// unbroken keep their increment of `H` and cells with both ends broken
    /// have none. A cell with one broken end keeps what its linear `y` and
    /// `U` can carry, `ū²Δy + ΔU²/Δy`, capped by the increment of `H`.
    pub fn cell_ac_energy(&self, k: usize) -> T {
        let dh = (self.h[k + 1] - self.h[k]).max(T::zero());
        match (self.broken[k], self.broken[k + 1]) {
            (false, false) => dh,
            (true, true) => T::zero(),
            _ => {
                let dy = self.y[k + 1] - self.y[k];
                if dy <= T::zero() {
                    return T::zero();
                }
                let (a, b) = (self.u[k], self.u[k + 1]);
                let third: T = lit(1.0 / 3.0);
                let du = b - a;
                ((a * a + a * b + b * b) * third * dy + du * du / dy).min(dh)
            }
        }
    }

    /// `V` from zero at the left end, cell by cell.
    pub fn rebuild_v(&mut self) {
        let mut acc = T::zero();
        self.v[0] = acc;
        for k in 0..self.len() - 1 {
            acc = acc + self.cell_ac_energy(k);
            self.v[k + 1] = acc;
        }
    }

    /// `H(+∞)`, the total mass of `ν`.
    pub fn h_infinity(&self) -> T {
        self.h[self.len() - 1]
    }

    /// `V(+∞)`, the surviving (absolutely continuous) energy.
    pub fn v_infinity(&self) -> T {
        self.v[self.len() - 1]
    }

    /// Normalized residual of `U²y_ξ² + U_ξ² = y_ξ V_ξ` at node `j`.
    pub fn c2_residual(&self, j: usize) -> T {
        let (u, yx, ux, vx, hx) = (self.u[j], self.y_xi[j], self.u_xi[j], self.v_xi[j], self.h_xi[j]);
        (u * u * yx * yx + ux * ux - yx * vx).abs() / (T::one() + yx * hx)
    }

    fn node(&self, j: usize) -> NodeSample<T> {
        NodeSample {
            y: self.y[j],
            u: self.u[j],
            v: self.v[j],
            h: self.h[j],
            y_xi: self.y_xi[j],
            u_xi: self.u_xi[j],
            v_xi: self.v_xi[j],
            h_xi: self.h_xi[j],
            tau: self.tau[j],
            broken: self.broken[j],
        }
    }

    /// Evaluates the state at an arbitrary label.
    ///
    /// Primal fields and `y_ξ`, `U_ξ`, `H_ξ - V_ξ` are interpolated linearly;
    /// `V_ξ` receives the nonlinear correction that keeps
    /// `U²y_ξ² + U_ξ² = y_ξ V_ξ` exact when it holds at both end nodes. Outside
    /// the grid `y` continues with the end slope and the rest is held constant.
    pub fn sample(&self, theta: T) -> NodeSample<T> {
        let n = self.len();
        if theta <= self.xi[0] {
            let mut s = self.node(0);
            s.y = self.y[0] + (theta - self.xi[0]) * self.y_xi[0];
            return s;
        }
        if theta >= self.xi[n - 1] {
            let mut s = self.node(n - 1);
            s.y = self.y[n - 1] + (theta - self.xi[n - 1]) * self.y_xi[n - 1];
            return s;
        }
        let k = locate(&self.xi, theta);
        let w = (theta - self.xi[k]) / (self.xi[k + 1] - self.xi[k]);
        if w <= T::zero() {
            return self.node(k);
        }
        if w >= T::one() {
            return self.node(k + 1);
        }
        let lerp = |f: &[T]| f[k] + w * (f[k + 1] - f[k]);
        let implied = |u: T, yx: T, ux: T| {
            if yx > T::zero() {
                (u * u * yx * yx + ux * ux) / yx
            } else {
                T::zero()
            }
        };
        let u = lerp(&self.u);
        let y_xi = lerp(&self.y_xi);
        let u_xi = lerp(&self.u_xi);
        let phi_a = implied(self.u[k], self.y_xi[k], self.u_xi[k]);
        let phi_b = implied(self.u[k + 1], self.y_xi[k + 1], self.u_xi[k + 1]);
        let phi = implied(u, y_xi, u_xi);
        let v_xi = (lerp(&self.v_xi) + phi - (phi_a + w * (phi_b - phi_a))).max(T::zero());
        let excess = (self.h_xi[k] - self.v_xi[k]) + w * ((self.h_xi[k + 1] - self.v_xi[k + 1]) - (self.h_xi[k] - self.v_xi[k]));
        let broken = self.broken[k] && self.broken[k + 1];
        let v_xi = if broken { T::zero() } else { v_xi };
        NodeSample {
            y: lerp(&self.y),
            u,
            v: lerp(&self.v),
            h: lerp(&self.h),
            y_xi,
            u_xi,
            v_xi,
            h_xi: v_xi + excess.max(T::zero()),
            tau: if broken { self.tau[k].max(self.tau[k + 1]) } else { T::infinity() },
            broken,
        }
    }

    fn from_samples(xi: Vec<T>, samples: &[NodeSample<T>], scale: &[T]) -> Self {
        let n = xi.len();
        let mut s = LagrangianState {
            xi,
            y: Vec::with_capacity(n),
            u: Vec::with_capacity(n),
            v: Vec::with_capacity(n),
            h: Vec::with_capacity(n),
            y_xi: Vec::with_capacity(n),
            u_xi: Vec::with_capacity(n),
            v_xi: Vec::with_capacity(n),
            h_xi: Vec::with_capacity(n),
            tau: Vec::with_capacity(n),
            broken: Vec::with_capacity(n),
        };
        for (p, &c) in samples.iter().zip(scale) {
            s.y.push(p.y);
            s.u.push(p.u);
            s.v.push(p.v);
            s.h.push(p.h);
            s.y_xi.push(p.y_xi * c);
            s.u_xi.push(p.u_xi * c);
            s.v_xi.push(p.v_xi * c);
            s.h_xi.push(p.h_xi * c);
            s.tau.push(p.tau);
            s.broken.push(p.broken);
        }
        s
    }

    /// `X ∘ f` on `f`'s label grid, derivatives by the chain rule.
    pub fn relabel(&self, f: &RelabelFunction<T>) -> Result<Self> {
        if !f.is_relabeling(lit(DEFAULT_SLOPE_BOUND)) {
            return Err(Error::NotRelabeling("slopes outside [1/c, c] or not increasing".into()));
        }
        let samples: Vec<_> = f.values().iter().map(|&th| self.sample(th)).collect();
        let out = Self::from_samples(f.grid().to_vec(), &samples, &f.derivative());
        out.check_structure()?;
        Ok(out)
    }

    /// The representative with `y + H = id`, i.e. `X ∘ (y + H)^{-1}`.
    ///
    /// The new labels are `y_j + H_j` and every derivative is divided by
    /// `y_ξ + H_ξ`, so that `y_ξ + H_ξ = 1` holds at each node.
    pub fn normalize_to_f0(&self) -> Result<Self> {
        let xi: Vec<T> = self.y.iter().zip(&self.h).map(|(&y, &h)| y + h).collect();
        if xi.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidLagrangian("y + H is not strictly increasing".into()));
        }
        let mut scale = Vec::with_capacity(self.len());
        for j in 0..self.len() {
            let d = self.y_xi[j] + self.h_xi[j];
            if d <= T::zero() {
                return Err(Error::InvalidLagrangian(format!("y_xi + H_xi vanishes at node {j}")));
            }
            scale.push(T::one() / d);
        }
        let samples: Vec<_> = (0..self.len()).map(|j| self.node(j)).collect();
        let mut out = Self::from_samples(xi, &samples, &scale);
        for j in 0..out.len() {
            // y_ξ + H_ξ = 1 exactly.
            out.h_xi[j] = T::one() - out.y_xi[j];
            if out.h_xi[j] < out.v_xi[j] {
                out.v_xi[j] = out.h_xi[j];
            }
        }
        Ok(out)
    }

    /// Largest `|y_j + H_j - ξ_j|`.
    pub fn f0_defect(&self) -> T {
        (0..self.len())
            .map(|j| (self.y[j] + self.h[j] - self.xi[j]).abs())
            .fold(T::zero(), T::max)
    }

    pub fn validate(&self, tol: T) -> Result<DiagnosticsReport<T>> {
        self.validate_with(&ValidationConfig::new(tol))
    }

    /// Nodewise checks of the membership conditions for the Lagrangian set,
    /// each reporting its worst residual and label.
    pub fn validate_with(&self, cfg: &ValidationConfig<T>) -> Result<DiagnosticsReport<T>> {
        self.check_structure()?;
        let n = self.len();
        let tol = cfg.tol;
        let mut report = DiagnosticsReport::new();
        let worst = |f: &dyn Fn(usize) -> T| {
            (0..n).fold((T::zero(), None), |(w, at), j| {
                let r = f(j);
                if r > w || r.is_nan() {
                    (r, Some(j))
                } else {
                    (w, at)
                }
            })
        };
        let worst_cell = |f: &dyn Fn(usize) -> T| {
            (0..n - 1).fold((T::zero(), None), |(w, at), j| {
                let r = f(j);
                if r > w {
                    (r, Some(j))
                } else {
                    (w, at)
                }
            })
        };
        let mut put = |name: &str, (r, at): (T, Option<usize>), tolerance: T| {
            report.insert(name, CheckResult::from_residual(r, tolerance).at(None, at.map(|j| self.xi[j])));
        };
        let zero = T::zero();
        put("y_xi_nonnegative", worst(&|j| (-self.y_xi[j]).max(zero)), tol);
        put("v_xi_nonnegative", worst(&|j| (-self.v_xi[j]).max(zero)), tol);
        put("h_xi_dominates_v_xi", worst(&|j| (self.v_xi[j] - self.h_xi[j]).max(zero)), tol);
        put(
            "y_xi_plus_h_xi_floor",
            worst(&|j| (cfg.c_floor - (self.y_xi[j] + self.h_xi[j])).max(zero)),
            zero,
        );
        put("c2_identity", worst(&|j| self.c2_residual(j)), tol);
        put(
            "flat_implies_no_energy",
            worst(&|j| if self.y_xi[j] <= tol { self.v_xi[j].abs() } else { zero }),
            tol,
        );
        put("y_nondecreasing", worst_cell(&|k| (self.y[k] - self.y[k + 1]).max(zero)), tol);
        put("v_nondecreasing", worst_cell(&|k| (self.v[k] - self.v[k + 1]).max(zero)), tol);
        put("h_nondecreasing", worst_cell(&|k| (self.h[k] - self.h[k + 1]).max(zero)), tol);
        put("left_boundary_energy", (self.v[0].abs().max(self.h[0].abs()), Some(0)), tol);
        let (ul, ur) = (self.u[0].abs(), self.u[n - 1].abs());
        put(
            "boundary_decay",
            if ul >= ur { (ul, Some(0)) } else { (ur, Some(n - 1)) },
            cfg.boundary_tol,
        );
        Ok(report)
    }
}

/// A sampled label map `ξ ↦ f(ξ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct RelabelFunction<T> {
    xi: Vec<T>,
    f: Vec<T>,
}

impl<T: Scalar> RelabelFunction<T> {
    pub fn new(xi: Vec<T>, f: Vec<T>) -> Result<Self> {
        if xi.len() < 2 || xi.len() != f.len() {
            return Err(Error::NotRelabeling("grid and values must have equal length >= 2".into()));
        }
        if xi.iter().chain(&f).any(|v| !v.is_finite()) || xi.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NotRelabeling("grid must be finite and strictly increasing".into()));
        }
        Ok(RelabelFunction { xi, f })
    }

    pub fn identity(xi: Vec<T>) -> Result<Self> {
        let f = xi.clone();
        Self::new(xi, f)
    }

    pub fn from_fn(xi: Vec<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let v = xi.iter().map(|&x| f(x)).collect();
        Self::new(xi, v)
    }

    pub fn grid(&self) -> &[T] {
        &self.xi
    }

    pub fn values(&self) -> &[T] {
        &self.f
    }

    pub fn slopes(&self) -> Vec<T> {
        self.xi
            .windows(2)
            .zip(self.f.windows(2))
            .map(|(x, f)| (f[1] - f[0]) / (x[1] - x[0]))
            .collect()
    }

    /// Nodal `f_ξ` (second-order differences).
    pub fn derivative(&self) -> Vec<T> {
        nodal_derivative(&self.xi, &self.f)
    }

    /// Sufficient condition for a relabeling: discrete slopes in
    /// `[1/c_max, c_max]`, with `f - id` and `Σ (f_ξ - 1)² Δξ` finite.
    pub fn is_relabeling(&self, c_max: T) -> bool {
        let lo = T::one() / c_max;
        let slopes = self.slopes();
        if slopes.iter().any(|&s| !(s >= lo && s <= c_max)) {
            return false;
        }
        let l2: T = slopes
            .iter()
            .zip(self.xi.windows(2))
            .map(|(&s, x)| (s - T::one()) * (s - T::one()) * (x[1] - x[0]))
            .sum();
        let dev = self
            .xi
            .iter()
            .zip(&self.f)
            .map(|(&x, &f)| (f - x).abs())
            .fold(T::zero(), T::max);
        l2.is_finite() && dev.is_finite()
    }

    /// Monotone inverse, exact at the nodes.
    pub fn inverse(&self) -> Result<Self> {
        Self::new(self.f.clone(), self.xi.clone())
    }
}
