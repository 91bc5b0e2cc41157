//! The maps between Eulerian data `(u, ν)` and Lagrangian quadruples.
//!
//! `L` inverts `x ↦ x + ν((-∞, x))`. Each atom becomes a plateau of `y`
//! bounded by two nodes at the same position, so that `H` jumps by the atom's
//! mass across it. `M` reads `u` off the characteristics, takes the absolutely
//! continuous energy from `V` and pushes the rest of `H` forward as atoms.

use crate::eulerian::{Atom, EulerianState};
use crate::error::{Error, Result};
use crate::lagrangian::{LagrangianState, RelabelFunction, DEFAULT_SLOPE_BOUND};
use crate::scalar::{kink_aware_derivative, lit, locate, median, Scalar};

/// Flatness threshold for `M`, relative to the median positive `y_ξ`.
pub const DEFAULT_PLATEAU_REL: f64 = 1e-9;

/// Atoms lighter than this fraction of `1 + H(∞)` are discarded by `M`.
const ATOM_MASS_FLOOR: f64 = 1e-6;

/// Allowed decrease of `y` between neighbouring nodes, relative to `1 + max|y|`.
const MONOTONE_TOL: f64 = 1e-8;

/// Merges atoms at identical positions.
fn merged_atoms<T: Scalar>(atoms: &[Atom<T>]) -> Vec<Atom<T>> {
    let mut out: Vec<Atom<T>> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match out.last_mut() {
            Some(b) if b.position == a.position => b.mass = b.mass + a.mass,
            _ => out.push(*a),
        }
    }
    out
}

fn check_atoms_inside<T: Scalar>(state: &EulerianState<T>) -> Result<()> {
    let x = state.x();
    let (lo, hi) = (x[0], x[x.len() - 1]);
    if let Some(a) = state.atoms().iter().find(|a| a.position < lo || a.position > hi) {
        return Err(Error::InvalidEulerian(format!("atom at {} lies outside the grid", a.position)));
    }
    Ok(())
}

/// `L`: Eulerian data to the representative in `F₀`.
///
/// Labels are `x_i + ν((-∞, x_i))` at the Eulerian nodes plus two plateau
/// endpoints per atom. At a regular node with nodal slope `s` and
/// `e = u² + s²` the derivatives are `y_ξ = 1/(1+e)`, `U_ξ = s y_ξ`,
/// `H_ξ = V_ξ = e y_ξ`; plateau nodes carry `y_ξ = U_ξ = V_ξ = 0`, `H_ξ = 1`
/// and `τ = 0`.
pub fn eul_to_lag<T: Scalar>(state: &EulerianState<T>) -> Result<LagrangianState<T>> {
    check_atoms_inside(state)?;
    let x = state.x();
    let u = state.u();
    let n = x.len();
    let f = state.cumulative_energy();
    let slope = kink_aware_derivative(x, u);
    let atoms = merged_atoms(state.atoms());
    let cap = n + 2 * atoms.len();
    let mut out = LagrangianState {
        xi: Vec::with_capacity(cap),
        y: Vec::with_capacity(cap),
        u: Vec::with_capacity(cap),
        v: Vec::with_capacity(cap),
        h: Vec::with_capacity(cap),
        y_xi: Vec::with_capacity(cap),
        u_xi: Vec::with_capacity(cap),
        v_xi: Vec::with_capacity(cap),
        h_xi: Vec::with_capacity(cap),
        tau: Vec::with_capacity(cap),
        broken: Vec::with_capacity(cap),
    };
    let zero = T::zero();
    let one = T::one();
    let mut below = zero; // atom mass strictly below the current position
    let mut next = 0usize;

    let push_plateau = |out: &mut LagrangianState<T>, pos: T, uu: T, ff: T, below: T, m: T| {
        for (hh, xi) in [(ff + below, pos + ff + below), (ff + below + m, pos + ff + below + m)] {
            out.xi.push(xi);
            out.y.push(pos);
            out.u.push(uu);
            out.v.push(ff);
            out.h.push(hh);
            out.y_xi.push(zero);
            out.u_xi.push(zero);
            out.v_xi.push(zero);
            out.h_xi.push(one);
            out.tau.push(zero);
            out.broken.push(true);
        }
    };

    for i in 0..n {
        // Atoms strictly inside the cell ending at node i.
        while next < atoms.len() && atoms[next].position < x[i] {
            let a = atoms[next];
            let k = i.max(1) - 1;
            let w = (a.position - x[k]) / (x[k + 1] - x[k]);
            let uu = u[k] + w * (u[k + 1] - u[k]);
            let ff = f[k] + w * (f[k + 1] - f[k]);
            push_plateau(&mut out, a.position, uu, ff, below, a.mass);
            below = below + a.mass;
            next += 1;
        }
        if next < atoms.len() && atoms[next].position == x[i] {
            let m = atoms[next].mass;
            push_plateau(&mut out, x[i], u[i], f[i], below, m);
            below = below + m;
            next += 1;
            continue;
        }
        let e = u[i] * u[i] + slope[i] * slope[i];
        let yx = one / (one + e);
        out.xi.push(x[i] + f[i] + below);
        out.y.push(x[i]);
        out.u.push(u[i]);
        out.v.push(f[i]);
        out.h.push(f[i] + below);
        out.y_xi.push(yx);
        out.u_xi.push(slope[i] * yx);
        out.v_xi.push(e * yx);
        out.h_xi.push(e * yx);
        out.tau.push(T::infinity());
        out.broken.push(false);
    }
    out.check_structure()?;
    Ok(out)
}

/// `x ↦ x + F(x) + ν_sing((-∞, x))` evaluated with precomputed tables.
struct LabelMap<'a, T> {
    x: &'a [T],
    f: Vec<T>,
    atoms: Vec<Atom<T>>,
}

impl<'a, T: Scalar> LabelMap<'a, T> {
    fn new(state: &'a EulerianState<T>) -> Self {
        LabelMap { x: state.x(), f: state.cumulative_energy(), atoms: merged_atoms(state.atoms()) }
    }

    fn energy(&self, z: T) -> T {
        let n = self.x.len();
        if z <= self.x[0] {
            return T::zero();
        }
        if z >= self.x[n - 1] {
            return self.f[n - 1];
        }
        let k = locate(self.x, z);
        let w = (z - self.x[k]) / (self.x[k + 1] - self.x[k]);
        self.f[k] + w * (self.f[k + 1] - self.f[k])
    }

    fn eval(&self, z: T) -> T {
        let below: T = self.atoms.iter().take_while(|a| a.position < z).map(|a| a.mass).sum();
        z + self.energy(z) + below
    }

    /// `sup{x | x + ν((-∞, x)) < θ}` by bisection.
    fn pseudo_inverse(&self, theta: T) -> T {
        let n = self.x.len();
        let total = self.f[n - 1] + self.atoms.iter().map(|a| a.mass).sum::<T>();
        if theta <= self.x[0] {
            return theta;
        }
        if theta > self.x[n - 1] + total {
            return theta - total;
        }
        let (mut lo, mut hi) = (self.x[0], self.x[n - 1]);
        // Invariant: eval(lo) < θ <= eval(hi) (or lo is the left end).
        for _ in 0..200 {
            let mid = lo + (hi - lo) / lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) < theta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Attribute the limit to the side where an atom sits, if any.
        if self.eval(hi) < theta || self.atoms.iter().any(|a| a.position == hi) {
            hi
        } else {
            lo
        }
    }
}

/// `L_g = L ∘ g`, built directly: the primal fields come from the
/// pseudo-inverse of `x + ν((-∞, x))` evaluated at `g(ξ)`, the derivatives
/// from `L`'s nodal data by the chain rule.
pub fn eul_to_lag_with_label<T: Scalar>(
    state: &EulerianState<T>,
    g: &RelabelFunction<T>,
) -> Result<LagrangianState<T>> {
    if !g.is_relabeling(lit(DEFAULT_SLOPE_BOUND)) {
        return Err(Error::NotRelabeling("slopes outside [1/c, c] or not increasing".into()));
    }
    let base = eul_to_lag(state)?;
    let map = LabelMap::new(state);
    let gx = g.derivative();
    let mut out = LagrangianState::trivial(g.grid().to_vec())?;
    for (j, (&theta, &dg)) in g.values().iter().zip(&gx).enumerate() {
        let yh = map.pseudo_inverse(theta);
        let s = base.sample(theta);
        out.y[j] = yh;
        out.u[j] = state.eval_u(yh);
        out.v[j] = map.energy(yh);
        out.h[j] = theta - yh;
        out.y_xi[j] = s.y_xi * dg;
        out.u_xi[j] = s.u_xi * dg;
        out.v_xi[j] = s.v_xi * dg;
        out.h_xi[j] = s.h_xi * dg;
        out.tau[j] = s.tau;
        out.broken[j] = s.broken;
    }
    out.check_structure()?;
    Ok(out)
}

/// A Lagrangian state read back on its own characteristic positions, before
/// the singular part is grouped into atoms.
struct ReadBack<T> {
    x: Vec<T>,
    u: Vec<T>,
    /// `ΔV` of every native cell.
    cell_energy: Vec<T>,
    /// `(position, mass)` of the energy that is not absolutely continuous,
    /// alternately inside each flat run and on the cell to its right;
    /// `None` where there is none.
    singular: Vec<Option<(T, T)>>,
    mass_floor: T,
}

/// Flat runs of nodes collapse to one native node whose whole `ΔH` is
/// singular. A native cell carries `ΔV` as absolutely continuous energy and
/// `ΔH - ΔV` as singular energy.
fn read_back<T: Scalar>(state: &LagrangianState<T>, plateau_rel: T) -> Result<ReadBack<T>> {
    state.check_structure()?;
    let n = state.len();
    let ymax = state.y.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let mono_tol: T = lit::<T>(MONOTONE_TOL) * (T::one() + ymax);
    for k in 0..n - 1 {
        if state.y[k + 1] - state.y[k] < -mono_tol {
            return Err(Error::InvalidLagrangian(format!(
                "y decreases between labels {} and {}",
                state.xi[k],
                state.xi[k + 1]
            )));
        }
    }
    let thr = median(state.y_xi.iter().copied().filter(|v| *v > T::zero())).unwrap_or(T::zero()) * plateau_rel;
    let flat: Vec<bool> = (0..n).map(|j| state.broken[j] || state.y_xi[j] <= thr).collect();
    let plateau_cell: Vec<bool> = (0..n - 1)
        .map(|k| {
            let dy = state.y[k + 1] - state.y[k];
            (flat[k] && flat[k + 1] && dy <= mono_tol) || dy <= thr * (state.xi[k + 1] - state.xi[k])
        })
        .collect();

    let h_inf = state.h[n - 1].abs();
    let mass_floor: T = lit::<T>(ATOM_MASS_FLOOR) * (T::one() + h_inf);
    let half: T = lit(0.5);

    // Native nodes with the range of Lagrangian nodes each one stands for.
    let mut xs: Vec<T> = Vec::with_capacity(n);
    let mut us: Vec<T> = Vec::with_capacity(n);
    let mut ranges: Vec<(usize, usize)> = Vec::with_capacity(n);
    let mut j = 0;
    while j < n {
        let mut last = j;
        while last < n - 1 && plateau_cell[last] {
            last += 1;
        }
        let (x, u) = if last == j && !flat[j] {
            (state.y[j], state.u[j])
        } else {
            let count: T = lit((last - j + 1) as f64);
            let ym = state.y[j..=last].iter().copied().sum::<T>() / count;
            let um = state.u[j..=last].iter().copied().sum::<T>() / count;
            (ym, um)
        };
        match xs.last() {
            Some(&l) if x <= l => {
                // Coincides with the previous node: extend its range.
                ranges.last_mut().expect("nonempty").1 = last;
            }
            _ => {
                xs.push(x);
                us.push(u);
                ranges.push((j, last));
            }
        }
        j = last + 1;
    }

    let mut singular = Vec::with_capacity(2 * xs.len());
    let mut cell_energy = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        let (a, b) = ranges[i];
        if b > a {
            singular.push(Some((xs[i], (state.h[b] - state.h[a]).max(T::zero()))));
        }
        if i + 1 < xs.len() {
            let c = ranges[i + 1].0;
            let dh = (state.h[c] - state.h[b]).max(T::zero());
            let dv = (state.v[c] - state.v[b]).max(T::zero()).min(dh);
            cell_energy.push(dv);
            let r = dh - dv;
            // A cell next to a flat run belongs to it.
            let x = match (b > a || flat[b], ranges[i + 1].1 > c || flat[c]) {
                (true, false) => xs[i],
                (false, true) => xs[i + 1],
                _ => half * (xs[i] + xs[i + 1]),
            };
            singular.push((r > T::zero()).then_some((x, r)));
        }
    }
    if xs.len() < 2 {
        // Everything collapsed onto one point; pad with a zero node.
        let x0 = xs.first().copied().unwrap_or(T::zero());
        xs = vec![x0 - T::one(), x0];
        us = vec![T::zero(), us.first().copied().unwrap_or(T::zero())];
        cell_energy = vec![T::zero()];
    }
    Ok(ReadBack { x: xs, u: us, cell_energy, singular, mass_floor })
}

/// Sums runs of consecutive `(position, mass)` pieces into atoms at their
/// centres of mass; atoms not heavier than `floor` are dropped.
fn group_atoms<T: Scalar>(pieces: impl Iterator<Item = Option<(T, T)>>, floor: T) -> Vec<Atom<T>> {
    let mut atoms = Vec::new();
    let (mut mass, mut moment) = (T::zero(), T::zero());
    let mut flush = |mass: &mut T, moment: &mut T| {
        if *mass > floor {
            atoms.push(Atom::new(*moment / *mass, *mass));
        }
        *mass = T::zero();
        *moment = T::zero();
    };
    for p in pieces {
        match p {
            Some((x, m)) => {
                mass = mass + m;
                moment = moment + m * x;
            }
            None => flush(&mut mass, &mut moment),
        }
    }
    flush(&mut mass, &mut moment);
    atoms
}

fn native<T: Scalar>(state: &LagrangianState<T>, plateau_rel: T) -> Result<EulerianState<T>> {
    let rb = read_back(state, plateau_rel)?;
    let atoms = group_atoms(rb.singular.into_iter(), rb.mass_floor);
    EulerianState::new(rb.x, rb.u, atoms)?.with_cell_energy(rb.cell_energy)
}

/// `M` on the characteristic grid: one node per regular Lagrangian node and
/// one per flat run. The absolutely continuous energy of each cell is `ΔV`.
pub fn lag_to_eul_native<T: Scalar>(state: &LagrangianState<T>) -> Result<EulerianState<T>> {
    native(state, lit(DEFAULT_PLATEAU_REL))
}

/// `M` resampled onto `x_grid`: `u` and `F` are interpolated linearly between
/// characteristic positions, both are zero to the left of them and `u` is
/// zero to the right. Atoms are kept wherever they lie.
pub fn lag_to_eul<T: Scalar>(state: &LagrangianState<T>, x_grid: &[T]) -> Result<EulerianState<T>> {
    lag_to_eul_with(state, x_grid, lit(DEFAULT_PLATEAU_REL))
}

pub fn lag_to_eul_with<T: Scalar>(
    state: &LagrangianState<T>,
    x_grid: &[T],
    plateau_rel: T,
) -> Result<EulerianState<T>> {
    let nat = native(state, plateau_rel)?;
    let u = x_grid.iter().map(|&x| nat.eval_u(x)).collect();
    let grid = EulerianState::new(x_grid.to_vec(), u, nat.atoms().to_vec())?;
    let f: Vec<T> = x_grid.iter().map(|&x| nat.compute_f(x)).collect::<Result<_>>()?;
    let cells = f.windows(2).map(|w| (w[1] - w[0]).max(T::zero())).collect();
    grid.with_cell_energy(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta_state() -> EulerianState<f64> {
        let x = EulerianState::uniform_grid(-2.0, 2.0, 41);
        EulerianState::zero(x).unwrap().with_atoms(vec![Atom::new(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn zero_data_maps_to_identity_labels() {
        let s = EulerianState::zero(EulerianState::uniform_grid(-1.0, 1.0, 11)).unwrap();
        let l = eul_to_lag(&s).unwrap();
        assert_eq!(l.xi, l.y);
        assert!(l.u.iter().chain(&l.v).chain(&l.h).all(|&v| v == 0.0));
    }

    #[test]
    fn delta_atom_becomes_plateau() {
        let l = eul_to_lag(&delta_state()).unwrap();
        assert_eq!(l.len(), 42);
        for j in 0..l.len() {
            let xi = l.xi[j];
            let expect = if xi <= 0.0 { xi } else if xi <= 1.0 { 0.0 } else { xi - 1.0 };
            assert!((l.y[j] - expect).abs() < 1e-15, "{xi}");
            assert!((l.h[j] - (xi - l.y[j])).abs() < 1e-15);
        }
        let p: Vec<_> = (0..l.len()).filter(|&j| l.broken[j]).collect();
        assert_eq!(p.len(), 2);
        assert_eq!((l.xi[p[0]], l.xi[p[1]]), (0.0, 1.0));
        assert_eq!(l.tau[p[0]], 0.0);
        assert!(l.validate(1e-12).unwrap().all_pass());
    }

    #[test]
    fn delta_round_trip() {
        let s = delta_state();
        let back = lag_to_eul(&eul_to_lag(&s).unwrap(), s.x()).unwrap();
        assert!(back.u().iter().all(|&u| u == 0.0));
        assert_eq!(back.atoms().len(), 1);
        assert!((back.atoms()[0].position).abs() < 1e-15);
        assert!((back.atoms()[0].mass - 1.0).abs() < 1e-14);
    }

    #[test]
    fn atom_between_nodes() {
        let x = EulerianState::uniform_grid(-3.0, 3.0, 61);
        let s = EulerianState::from_fn(x, |x: f64| (-x * x).exp(), vec![Atom::new(0.037, 0.25)]).unwrap();
        let l = eul_to_lag(&s).unwrap();
        assert_eq!(l.len(), 63);
        assert!(l.f0_defect() < 1e-14);
        let back = lag_to_eul(&l, s.x()).unwrap();
        for (a, b) in back.u().iter().zip(s.u()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((back.atoms()[0].position - 0.037).abs() < 1e-15);
        assert!((back.atoms()[0].mass - 0.25).abs() < 1e-14);
    }

    #[test]
    fn peakon_satisfies_identity_exactly() {
        let x = EulerianState::uniform_grid(-20.0, 20.0, 801);
        let s = EulerianState::from_fn(x, |x: f64| (-x.abs()).exp(), vec![]).unwrap();
        let l = eul_to_lag(&s).unwrap();
        assert_eq!(l.v, l.h);
        assert!((0..l.len()).all(|j| l.c2_residual(j) < 1e-15));
        assert!(l.validate(1e-10).unwrap().all_pass());
    }

    #[test]
    fn atoms_outside_grid_are_rejected() {
        let s = EulerianState::zero(vec![0.0, 1.0]).unwrap().with_atoms(vec![Atom::new(2.0, 1.0)]).unwrap();
        assert!(eul_to_lag(&s).is_err());
    }

    #[test]
    fn decreasing_y_is_rejected() {
        let mut l = LagrangianState::trivial(vec![0.0, 1.0, 2.0]).unwrap();
        l.y[2] = 0.5;
        let e = lag_to_eul_native(&l).unwrap_err();
        assert!(e.to_string().starts_with("invalid Lagrangian state"));
    }

    #[test]
    fn direct_label_construction_with_identity() {
        let x = EulerianState::uniform_grid(-5.0, 5.0, 101);
        let s = EulerianState::from_fn(x, |x: f64| (-x.abs()).exp(), vec![Atom::new(0.5, 0.3)]).unwrap();
        let l = eul_to_lag(&s).unwrap();
        let g = RelabelFunction::identity(l.xi.clone()).unwrap();
        let lg = eul_to_lag_with_label(&s, &g).unwrap();
        for j in 0..l.len() {
            assert!((l.y[j] - lg.y[j]).abs() < 1e-12, "{j}");
            assert!((l.h[j] - lg.h[j]).abs() < 1e-12, "{j}");
            assert!((l.u[j] - lg.u[j]).abs() < 1e-12, "{j}");
        }
    }
}
