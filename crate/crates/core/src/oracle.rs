//! Closed-form dissipative peakon–antipeakon solution.
//!
//! With `a = D(t* - t)`, the amplitude is `p(t) = D coth a` and the (negative)
//! peak position is `q(t) = -ln cosh a`. Both blow up or vanish at `t*`, where
//! all energy concentrates at the origin and is removed; afterwards `u`, `F`,
//! `p` and `p_x` vanish identically.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eulerian::EulerianState;
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct PeakonAntipeakon<T> {
    pub p0: T,
    pub q0: T,
    pub d: T,
    pub t_star: T,
}

/// `ln cosh a` for `a >= 0` without overflow or cancellation.
fn ln_cosh<T: Scalar>(a: T) -> T {
    let a = a.abs();
    if a < lit(1.0) {
        let s = (a / lit(2.0)).sinh();
        (lit::<T>(2.0) * s * s).ln_1p()
    } else {
        a + (lit::<T>(-2.0) * a).exp().ln_1p() - T::LN_2()
    }
}

impl<T: Scalar> PeakonAntipeakon<T> {
    /// From the initial amplitude `p0 > 0` and position `q0 < 0`.
    pub fn from_initial(p0: T, q0: T) -> Result<Self> {
        if !(p0.is_finite() && q0.is_finite() && p0 > T::zero() && q0 < T::zero()) {
            return Err(Error::OracleParams(format!("need p0 > 0 and q0 < 0, got p0 = {p0}, q0 = {q0}")));
        }
        let d = p0 * (-(lit::<T>(2.0) * q0).exp_m1()).sqrt();
        if !(d > T::zero()) {
            return Err(Error::OracleParams("D vanishes".into()));
        }
        let t_star = (lit::<T>(2.0) * d / (p0 - d)).ln_1p() / (lit::<T>(2.0) * d);
        Ok(PeakonAntipeakon { p0, q0, d, t_star })
    }

    /// From the invariant `D > 0` and the breaking time `t* > 0`.
    pub fn from_d_tstar(d: T, t_star: T) -> Result<Self> {
        if !(d.is_finite() && t_star.is_finite() && d > T::zero() && t_star > T::zero()) {
            return Err(Error::OracleParams(format!("need D > 0 and t* > 0, got D = {d}, t* = {t_star}")));
        }
        let a = d * t_star;
        Ok(PeakonAntipeakon { p0: d / a.tanh(), q0: -ln_cosh(a), d, t_star })
    }

    pub fn before_breaking(&self, t: T) -> bool {
        t < self.t_star
    }

    /// Amplitude `p(t)`, valid for `t < t*`.
    pub fn p_at(&self, t: T) -> T {
        self.d / (self.d * (self.t_star - t)).tanh()
    }

    /// Peak position `q(t) < 0`, valid for `t < t*`.
    pub fn q_at(&self, t: T) -> T {
        -ln_cosh(self.d * (self.t_star - t))
    }

    pub fn exact_u(&self, t: T, x: T) -> T {
        if !self.before_breaking(t) {
            return T::zero();
        }
        let (p, q) = (self.p_at(t), self.q_at(t));
        let two: T = lit(2.0);
        if x <= q {
            -two * p * x.exp() * q.sinh()
        } else if x < -q {
            -two * p * q.exp() * x.sinh()
        } else {
            two * p * (-x).exp() * q.sinh()
        }
    }

    /// `F(t, x) = ∫_{-∞}^x (u² + u_x²)`.
    pub fn exact_f(&self, t: T, x: T) -> T {
        if !self.before_breaking(t) {
            return T::zero();
        }
        let (p, q) = (self.p_at(t), self.q_at(t));
        let two: T = lit(2.0);
        let d2 = self.d * self.d;
        let gap = -(two * q).exp_m1(); // 1 - e^{2q}
        if x <= q {
            d2 * gap * (two * (x - q)).exp()
        } else if x < -q {
            two * d2 + two * p * p * (two * q).exp() * (two * x).sinh()
        } else {
            lit::<T>(4.0) * d2 - d2 * gap * (-two * (x + q)).exp()
        }
    }

    /// `(p(t, x), p_x(t, x))`.
    pub fn exact_p_px(&self, t: T, x: T) -> (T, T) {
        if !self.before_breaking(t) {
            return (T::zero(), T::zero());
        }
        let (pt, q) = (self.p_at(t), self.q_at(t));
        let (two, three, four): (T, T, T) = (lit(2.0), lit(3.0), lit(4.0));
        let d2 = self.d * self.d;
        let a = d2 * d2 / (four * pt * pt);
        let b = (pt * pt - d2) / two;
        let s = q.sinh() + (three * q).sinh();
        if x <= q {
            let e1 = (x + q).exp();
            let e2 = (two * (x - q)).exp();
            let e3 = (x - q).exp();
            let tail = b * x.exp() * s;
            (a * (e1 - two * e2 + three * e3) - tail, a * (e1 - four * e2 + three * e3) - tail)
        } else if x < -q {
            let c = three * (-q).exp() + two * q.exp() - (three * q).exp();
            let (l, r) = ((q - x).exp(), (x + q).exp());
            (
                a * (l + r) + b * (-two * (two * x).cosh() - two + x.cosh() * c),
                a * (r - l) + b * (-four * (two * x).sinh() + x.sinh() * c),
            )
        } else {
            let e1 = (q - x).exp();
            let e2 = (-two * (x + q)).exp();
            let e3 = (-(x + q)).exp();
            let tail = b * (-x).exp() * s;
            (a * (e1 - two * e2 + three * e3) - tail, a * (-e1 + four * e2 - three * e3) + tail)
        }
    }

    /// `n` nodes on `[a, b]` (with `a < q0 < -q0 < b`), uniform on each of
    /// the three pieces cut by the peaks `±q0`, so that both kinks are nodes.
    /// Piece sizes follow their lengths; the middle one gets at least two cells.
    pub fn fitted_grid(&self, a: T, b: T, n: usize) -> Result<Vec<T>> {
        self.fitted_grid_at(T::zero(), a, b, n)
    }

    /// [`Self::fitted_grid`] for the peaks `±q(t)`, `t < t*`.
    pub fn fitted_grid_at(&self, t: T, a: T, b: T, n: usize) -> Result<Vec<T>> {
        if !(t >= T::zero() && self.before_breaking(t)) {
            return Err(Error::OracleParams(format!("no peaks at t = {t}")));
        }
        let q = self.q_at(t);
        if !(a < q && -q < b) || n < 7 {
            return Err(Error::OracleParams(format!("need a < q < -q < b and n >= 7, got [{a}, {b}], n = {n}")));
        }
        let cuts = [a, q, -q, b];
        let cells = n - 1;
        let share = |len: T, of: T, count: usize| (len / of * lit(count as f64)).round().to_usize().unwrap_or(0);
        let mid = share(cuts[2] - cuts[1], b - a, cells).max(2);
        let rest = cells - mid;
        let left = share(cuts[1] - cuts[0], (cuts[1] - cuts[0]) + (cuts[3] - cuts[2]), rest).clamp(1, rest - 1);
        let counts = [left, mid, rest - left];
        let mut x = Vec::with_capacity(n);
        for i in 0..3 {
            let h = (cuts[i + 1] - cuts[i]) / lit(counts[i] as f64);
            for k in 0..counts[i] {
                x.push(cuts[i] + h * lit(k as f64));
            }
        }
        x.push(b);
        Ok(x)
    }

    /// The initial profile sampled on `x`, without atoms.
    pub fn initial_state(&self, x: Vec<T>) -> Result<EulerianState<T>> {
        EulerianState::from_fn(x, |x| self.exact_u(T::zero(), x), Vec::new())
    }

    /// The exact profile at time `t` sampled on `x`.
    pub fn state_at(&self, t: T, x: Vec<T>) -> Result<EulerianState<T>> {
        EulerianState::from_fn(x, |x| self.exact_u(t, x), Vec::new())
    }

    /// Writes `t,x,u,F,p,p_x` rows for every `(t, x)` pair, time-major.
    pub fn write_csv<W: Write>(&self, mut w: W, times: &[T], xs: &[T]) -> io::Result<()> {
        writeln!(w, "t,x,u,F,p,p_x")?;
        for &t in times {
            for &x in xs {
                let (p, px) = self.exact_p_px(t, x);
                writeln!(w, "{},{},{},{},{},{}", t, x, self.exact_u(t, x), self.exact_f(t, x), p, px)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> PeakonAntipeakon<f64> {
        PeakonAntipeakon::from_d_tstar(1.0, 1.0).unwrap()
    }

    #[test]
    fn parameters_from_d_and_breaking_time() {
        let o = unit();
        let e2 = (-2.0f64).exp();
        assert!((o.p0 - (1.0 + e2) / (1.0 - e2)).abs() < 1e-14);
        assert!((o.q0 - (2.0 * (-1.0f64).exp() / (1.0 + e2)).ln()).abs() < 1e-14);
        assert!((o.p0 - 1.313035285499331).abs() < 1e-12);
        assert!((o.q0 + 0.433780830483027).abs() < 1e-12);
        let back = PeakonAntipeakon::from_initial(o.p0, o.q0).unwrap();
        assert!((back.d - 1.0).abs() < 1e-12);
        assert!((back.t_star - 1.0).abs() < 1e-12);
        assert!((o.p_at(0.0) - o.p0).abs() < 1e-12);
    }

    #[test]
    fn invalid_parameters() {
        assert!(PeakonAntipeakon::from_initial(1.0, 0.5).is_err());
        assert!(PeakonAntipeakon::from_initial(-1.0, -0.5).is_err());
        assert!(PeakonAntipeakon::from_d_tstar(0.0, 1.0).is_err());
        assert!(PeakonAntipeakon::<f64>::from_d_tstar(1.0, f64::NAN).is_err());
    }

    #[test]
    fn breaking_time_for_fixed_amplitude() {
        // t* = atanh(D/p0)/D grows with D and tends to 1/p0 as D -> 0.
        let ts: Vec<f64> = [1e-6, 0.1, 0.5, 0.9, 1.2]
            .iter()
            .map(|&d: &f64| {
                let q0 = 0.5 * (1.0 - d * d / (1.5f64 * 1.5)).ln();
                PeakonAntipeakon::from_initial(1.5, q0).unwrap().t_star
            })
            .collect();
        assert!(ts.windows(2).all(|w| w[1] > w[0]), "{ts:?}");
        assert!((ts[0] - 1.0 / 1.5).abs() < 1e-9);
    }

    #[test]
    fn u_at_peak_and_after_breaking() {
        let o = unit();
        assert!((o.exact_u(0.0, o.q0) - 1.0 / o.p0).abs() < 1e-14);
        assert!((o.exact_u(0.0, o.q0) - 0.7615941559557649).abs() < 1e-12);
        assert_eq!(o.exact_u(1.0, 0.3), 0.0);
        assert_eq!(o.exact_u(1.7, -2.0), 0.0);
        for &x in &[0.0, 0.1, 0.4, 3.0] {
            assert!((o.exact_u(0.6, -x) + o.exact_u(0.6, x)).abs() < 1e-15);
        }
    }

    #[test]
    fn energy_limits() {
        let o = unit();
        for &t in &[0.0, 0.5, 0.99] {
            assert!((o.exact_f(t, 40.0) - 4.0).abs() < 1e-12);
            assert!((o.exact_f(t, 0.0) - 2.0).abs() < 1e-12);
        }
        assert_eq!(o.exact_f(1.0, 5.0), 0.0);
    }

    #[test]
    fn pressure_reference_values() {
        // Independent numerical quadrature of 1/4 ∫ e^{-|x-y|}(2u² + u_x²) dy.
        let o = unit();
        let cases = [
            (0.0, -2.0, 0.19618541006517679),
            (0.5, -0.05, 0.9319699447954061),
            (0.9, 3.0, 0.05002377609644016),
        ];
        for (t, x, p) in cases {
            let (pp, _) = o.exact_p_px(t, x);
            assert!((pp - p).abs() < 1e-13, "t={t} x={x}: {pp} vs {p}");
        }
        assert_eq!(o.exact_p_px(1.2, 0.4), (0.0, 0.0));
        assert!(o.exact_p_px(0.7, 0.0).1.abs() < 1e-15);
    }

    #[test]
    fn branches_join_continuously() {
        let o = unit();
        for &t in &[0.0, 0.3, 0.8, 0.95] {
            let (q, p) = (o.q_at(t), o.p_at(t));
            // Slopes near the peaks are O(p²); allow for the 2e-13 offset.
            let tol = 1e-12 * (1.0 + p * p);
            for &x0 in &[q, -q] {
                let (lo, hi) = (x0 - 1e-13, x0 + 1e-13);
                assert!((o.exact_u(t, lo) - o.exact_u(t, hi)).abs() < tol);
                assert!((o.exact_f(t, lo) - o.exact_f(t, hi)).abs() < tol);
                let (pl, pxl) = o.exact_p_px(t, lo);
                let (ph, pxh) = o.exact_p_px(t, hi);
                assert!((pl - ph).abs() < tol && (pxl - pxh).abs() < tol, "t={t} x={x0}");
            }
        }
    }

    #[test]
    fn fitted_grid_contains_both_peaks() {
        let o = unit();
        for n in [7, 64, 513, 4096] {
            let x = o.fitted_grid(-20.0, 20.0, n).unwrap();
            assert_eq!(x.len(), n);
            assert!(x.windows(2).all(|w| w[1] > w[0]));
            assert!(x.contains(&o.q0) && x.contains(&-o.q0));
            assert_eq!((x[0], x[n - 1]), (-20.0, 20.0));
        }
        assert!(o.fitted_grid(-20.0, 20.0, 5).is_err());
        assert!(o.fitted_grid(0.0, 20.0, 100).is_err());
        assert!(o.fitted_grid_at(1.0, -20.0, 20.0, 100).is_err());
        let x = o.fitted_grid_at(0.5, -20.0, 20.0, 100).unwrap();
        assert!(x.contains(&o.q_at(0.5)) && x.contains(&-o.q_at(0.5)));
    }

    #[test]
    fn f32_evaluates() {
        let o = PeakonAntipeakon::<f32>::from_d_tstar(1.0, 1.0).unwrap();
        assert!((o.exact_f(0.5, 30.0) - 4.0).abs() < 1e-4);
    }
}
