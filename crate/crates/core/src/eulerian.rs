//! Eulerian data `(u, ν)`: a sampled wave profile plus a finite positive
//! energy measure.
//!
//! `u` is piecewise linear between the nodes and zero outside the grid. The
//! absolutely continuous part of `ν` is `(u² + u_x²) dx` computed from `u`,
//! unless per-cell energies are attached (as `M` does, from the Lagrangian
//! `V`). The singular part is a list of atoms.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{exp_scan, quadratic_cell_integral};
use crate::scalar::{locate, lit, Scalar};

/// Default bound on `|u|` at both boundary nodes.
pub const DEFAULT_DECAY_TOL: f64 = 1e-8;

/// A point mass of `ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(T, T)", into = "(T, T)")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct Atom<T> {
    pub position: T,
    pub mass: T,
}

impl<T> Atom<T> {
    pub fn new(position: T, mass: T) -> Self {
        Atom { position, mass }
    }
}

impl<T> From<(T, T)> for Atom<T> {
    fn from((position, mass): (T, T)) -> Self {
        Atom { position, mass }
    }
}

impl<T> From<Atom<T>> for (T, T) {
    fn from(a: Atom<T>) -> Self {
        (a.position, a.mass)
    }
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
struct RawEulerian<T> {
    x: Vec<T>,
    u: Vec<T>,
    #[serde(default)]
    atoms: Vec<Atom<T>>,
    #[serde(default)]
    cell_energy: Option<Vec<T>>,
}

impl<T: Scalar> TryFrom<RawEulerian<T>> for EulerianState<T> {
    type Error = Error;
    fn try_from(raw: RawEulerian<T>) -> Result<Self> {
        let s = EulerianState::new(raw.x, raw.u, raw.atoms)?;
        match raw.cell_energy {
            Some(e) => s.with_cell_energy(e),
            None => Ok(s),
        }
    }
}

/// Serializes as `{"x": [...], "u": [...], "atoms": [[pos, mass], ...]}`, plus
/// `"cell_energy"` when attached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEulerian<T>")]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct EulerianState<T> {
    x: Vec<T>,
    u: Vec<T>,
    atoms: Vec<Atom<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cell_energy: Option<Vec<T>>,
}

impl<T: Scalar> EulerianState<T> {
    /// Checks the structural invariants. Atoms are stored sorted by position.
    pub fn new(x: Vec<T>, u: Vec<T>, mut atoms: Vec<Atom<T>>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidEulerian(m.to_string()));
        if x.len() < 2 {
            return bad("need at least two grid nodes");
        }
        if x.len() != u.len() {
            return bad("x and u differ in length");
        }
        if x.iter().any(|v| !v.is_finite()) {
            return bad("non-finite grid node");
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return bad("grid is not strictly increasing");
        }
        if u.iter().any(|v| !v.is_finite()) {
            return bad("non-finite wave height");
        }
        for a in &atoms {
            if !a.position.is_finite() || !a.mass.is_finite() {
                return bad("non-finite atom");
            }
            if a.mass <= T::zero() {
                return bad("atom mass must be positive");
            }
        }
        atoms.sort_by(|a, b| a.position.partial_cmp(&b.position).expect("finite"));
        Ok(EulerianState { x, u, atoms, cell_energy: None })
    }

    /// Attaches the absolutely continuous energy of every cell, replacing the
    /// values computed from `u`.
    pub fn with_cell_energy(mut self, e: Vec<T>) -> Result<Self> {
        if e.len() + 1 != self.len() {
            return Err(Error::InvalidEulerian("need one cell energy per cell".into()));
        }
        if e.iter().any(|v| !(v.is_finite() && *v >= T::zero())) {
            return Err(Error::InvalidEulerian("cell energies must be finite and nonnegative".into()));
        }
        self.cell_energy = Some(e);
        Ok(self)
    }

    /// Per-cell energies, when attached.
    pub fn attached_cell_energy(&self) -> Option<&[T]> {
        self.cell_energy.as_deref()
    }

    /// Samples `f` on `x`.
    pub fn from_fn(x: Vec<T>, f: impl Fn(T) -> T, atoms: Vec<Atom<T>>) -> Result<Self> {
        let u = x.iter().map(|&xi| f(xi)).collect();
        Self::new(x, u, atoms)
    }

    pub fn zero(x: Vec<T>) -> Result<Self> {
        let u = vec![T::zero(); x.len()];
        Self::new(x, u, Vec::new())
    }

    /// Uniform grid of `n` nodes on `[a, b]`.
    pub fn uniform_grid(a: T, b: T, n: usize) -> Vec<T> {
        assert!(n >= 2, "uniform grid needs two nodes");
        let h = (b - a) / lit((n - 1) as f64);
        (0..n)
            .map(|i| if i == n - 1 { b } else { a + h * lit(i as f64) })
            .collect()
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn u(&self) -> &[T] {
        &self.u
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn with_atoms(&self, atoms: Vec<Atom<T>>) -> Result<Self> {
        let s = Self::new(self.x.clone(), self.u.clone(), atoms)?;
        match &self.cell_energy {
            Some(e) => s.with_cell_energy(e.clone()),
            None => Ok(s),
        }
    }

    /// Truncation control: `|u|` at both ends must be below `tol`, and every
    /// atom must lie inside the grid.
    pub fn check_decay(&self, tol: T) -> Result<()> {
        let n = self.len();
        if self.u[0].abs() >= tol || self.u[n - 1].abs() >= tol {
            return Err(Error::InvalidEulerian(format!(
                "|u| at the boundary ({}, {}) is not below the decay tolerance {}",
                self.u[0],
                self.u[n - 1],
                tol
            )));
        }
        for a in &self.atoms {
            if a.position < self.x[0] || a.position > self.x[n - 1] {
                return Err(Error::InvalidEulerian(format!(
                    "atom at {} lies outside the grid",
                    a.position
                )));
            }
        }
        Ok(())
    }

    /// Per-cell slopes of the piecewise-linear interpolant.
    pub fn slopes(&self) -> Vec<T> {
        self.x
            .windows(2)
            .zip(self.u.windows(2))
            .map(|(x, u)| (u[1] - u[0]) / (x[1] - x[0]))
            .collect()
    }

    /// Largest forward-difference slope and the cell it occurs in. This is the
    /// sample-level proxy for the one-sided Lipschitz bound `u_x <= D`.
    pub fn max_forward_slope(&self) -> (T, usize) {
        self.slopes()
            .into_iter()
            .enumerate()
            .fold((T::neg_infinity(), 0), |acc, (k, s)| if s > acc.0 { (s, k) } else { acc })
    }

    /// `∫_cell (u² + u_x²)`: trapezoid for `u²`, exact for the squared slope.
    /// Attached energies take precedence.
    pub fn cell_energies(&self) -> Vec<T> {
        if let Some(e) = &self.cell_energy {
            return e.clone();
        }
        let half: T = lit(0.5);
        self.x
            .windows(2)
            .zip(self.u.windows(2))
            .map(|(x, u)| {
                let h = x[1] - x[0];
                let s = (u[1] - u[0]) / h;
                h * (half * (u[0] * u[0] + u[1] * u[1]) + s * s)
            })
            .collect()
    }

    /// `F` at every node.
    pub fn cumulative_energy(&self) -> Vec<T> {
        let mut f = Vec::with_capacity(self.len());
        let mut acc = T::zero();
        f.push(acc);
        for e in self.cell_energies() {
            acc = acc + e;
            f.push(acc);
        }
        f
    }

    /// `F(x) = ∫_{-∞}^x (u² + u_x²)`. Atoms are not included. Between nodes the
    /// energy of a cell is spread uniformly over it.
    pub fn compute_f(&self, x: T) -> Result<T> {
        if !x.is_finite() {
            return Err(Error::InvalidQueryPoint);
        }
        let n = self.len();
        if x <= self.x[0] {
            return Ok(T::zero());
        }
        let cum = self.cumulative_energy();
        if x >= self.x[n - 1] {
            return Ok(cum[n - 1]);
        }
        let k = locate(&self.x, x);
        let frac = (x - self.x[k]) / (self.x[k + 1] - self.x[k]);
        Ok(cum[k] + frac * (cum[k + 1] - cum[k]))
    }

    /// `F(+∞)`, the total absolutely continuous energy.
    pub fn energy(&self) -> T {
        self.cell_energies().into_iter().sum()
    }

    pub fn h1_norm(&self) -> T {
        self.energy().sqrt()
    }

    pub fn atom_mass(&self) -> T {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// `ν(ℝ) = F(+∞) + Σ atom masses`.
    pub fn nu_total(&self) -> T {
        self.energy() + self.atom_mass()
    }

    /// `ν((-∞, x))`: the open interval excludes an atom sitting at `x`.
    pub fn nu_below(&self, x: T) -> Result<T> {
        let atoms: T = self
            .atoms
            .iter()
            .filter(|a| a.position < x)
            .map(|a| a.mass)
            .sum();
        Ok(self.compute_f(x)? + atoms)
    }

    /// Piecewise-linear `u(x)`, zero outside the grid.
    pub fn eval_u(&self, x: T) -> T {
        let n = self.len();
        if x < self.x[0] || x > self.x[n - 1] || !x.is_finite() {
            return T::zero();
        }
        let k = locate(&self.x, x);
        let s = (x - self.x[k]) / (self.x[k + 1] - self.x[k]);
        self.u[k] + s * (self.u[k + 1] - self.u[k])
    }

    /// `∫ φ dν` with the absolutely continuous part evaluated cellwise at the
    /// cell midpoints.
    pub fn integrate_against(&self, phi: impl Fn(T) -> T) -> T {
        let half: T = lit(0.5);
        let ac: T = self
            .x
            .windows(2)
            .zip(self.cell_energies())
            .map(|(x, e)| phi(half * (x[0] + x[1])) * e)
            .sum();
        ac + self.atoms.iter().map(|a| phi(a.position) * a.mass).sum()
    }

    /// Cell integrals of `2u² + u_x²` against the kernel anchored at each
    /// cell's right end (`e^{-(b-z)}`) and left end (`e^{-(z-a)}`). Exact for
    /// the piecewise-linear `u`.
    fn pressure_cell_terms(&self) -> (Vec<T>, Vec<T>) {
        let n = self.len();
        let mut right = Vec::with_capacity(n - 1);
        let mut left = Vec::with_capacity(n - 1);
        for k in 0..n - 1 {
            let (a, b) = (self.u[k], self.u[k + 1]);
            let h = self.x[k + 1] - self.x[k];
            let (r, l) = pressure_cell_pair(h, a, b);
            right.push(r);
            left.push(l);
        }
        (right, left)
    }

    /// `(p, p_x)` at every grid node in O(N).
    pub fn p_px_grid(&self) -> (Vec<T>, Vec<T>) {
        let (right, left) = self.pressure_cell_terms();
        let scan = exp_scan(&self.x, &right, &left);
        (scan.symmetric(), scan.antisymmetric())
    }

    /// `(p(x), p_x(x))` at an arbitrary point, O(N).
    pub fn compute_p_px(&self, x: T) -> Result<(T, T)> {
        if !x.is_finite() {
            return Err(Error::InvalidQueryPoint);
        }
        let n = self.len();
        let mut lsum = T::zero();
        let mut rsum = T::zero();
        let quarter: T = lit(0.25);
        for k in 0..n - 1 {
            let (xa, xb) = (self.x[k], self.x[k + 1]);
            let (ua, ub) = (self.u[k], self.u[k + 1]);
            if xb <= x {
                let (r, _) = pressure_cell_pair(xb - xa, ua, ub);
                lsum = lsum + (-(x - xb)).exp() * r;
            } else if xa >= x {
                let (_, l) = pressure_cell_pair(xb - xa, ua, ub);
                rsum = rsum + (-(xa - x)).exp() * l;
            } else {
                let um = self.eval_u(x);
                let (r, _) = pressure_cell_pair_sloped(x - xa, ua, um, (ub - ua) / (xb - xa));
                let (_, l) = pressure_cell_pair_sloped(xb - x, um, ub, (ub - ua) / (xb - xa));
                lsum = lsum + r;
                rsum = rsum + l;
            }
        }
        Ok((quarter * (lsum + rsum), -quarter * (lsum - rsum)))
    }

    /// Writes `x,u,F,p,p_x` rows with a one-line header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let f = self.cumulative_energy();
        let (p, px) = self.p_px_grid();
        writeln!(w, "x,u,F,p,p_x")?;
        for i in 0..self.len() {
            writeln!(w, "{},{},{},{},{}", self.x[i], self.u[i], f[i], p[i], px[i])?;
        }
        Ok(())
    }
}

fn pressure_cell_pair<T: Scalar>(h: T, ua: T, ub: T) -> (T, T) {
    pressure_cell_pair_sloped(h, ua, ub, (ub - ua) / h)
}

/// `(∫ e^{-(b-z)} f, ∫ e^{-(z-a)} f)` over a cell of width `h` with end values
/// `ua`, `ub` and slope `s`, where `f = 2u² + s²`.
fn pressure_cell_pair_sloped<T: Scalar>(h: T, ua: T, ub: T, s: T) -> (T, T) {
    if h <= T::zero() {
        return (T::zero(), T::zero());
    }
    let two: T = lit(2.0);
    let four: T = lit(4.0);
    let du = ub - ua;
    let s2 = s * s;
    let right = quadratic_cell_integral(h, h, [two * ub * ub + s2, -four * ub * du, two * du * du]);
    let left = quadratic_cell_integral(h, h, [two * ua * ua + s2, four * ua * du, two * du * du]);
    (right.max(T::zero()), left.max(T::zero()))
}
