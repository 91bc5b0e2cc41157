//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real floating point type the solver can run on (`f32` or `f64`).
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal, panicking only if the target cannot
    /// represent finite doubles at all.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("scalar type must represent f64 literals")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Shorthand for [`Scalar::lit`].
#[inline]
pub(crate) fn lit<T: Scalar>(v: f64) -> T {
    T::lit(v)
}

/// Index `k` of the cell `[grid[k], grid[k+1]]` containing `x`; `x` must lie
/// within the grid. Ties resolve to the leftmost cell whose right end is `>= x`.
pub(crate) fn locate<T: Scalar>(grid: &[T], x: T) -> usize {
    let n = grid.len();
    debug_assert!(n >= 2);
    let idx = grid.partition_point(|&g| g < x);
    idx.clamp(1, n - 1) - 1
}

pub(crate) fn median<T: Scalar>(values: impl Iterator<Item = T>) -> Option<T> {
    let mut v: Vec<T> = values.filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / lit(2.0)
    })
}

/// Second-order nodal derivative of samples on a nonuniform grid.
pub(crate) fn nodal_derivative<T: Scalar>(grid: &[T], values: &[T]) -> Vec<T> {
    let n = grid.len();
    let mut d = vec![T::zero(); n];
    if n < 2 {
        return d;
    }
    d[0] = (values[1] - values[0]) / (grid[1] - grid[0]);
    d[n - 1] = (values[n - 1] - values[n - 2]) / (grid[n - 1] - grid[n - 2]);
    for i in 1..n - 1 {
        let hl = grid[i] - grid[i - 1];
        let hr = grid[i + 1] - grid[i];
        let sl = (values[i] - values[i - 1]) / hl;
        let sr = (values[i + 1] - values[i]) / hr;
        d[i] = (sl * hr + sr * hl) / (hl + hr);
    }
    d
}

/// Nodal derivative that stays one-sided at kinks. Where the two cell slopes
/// at a node differ by more than `KINK_RATIO` times the smaller of the
/// neighbouring slope changes, the side whose own neighbour agrees better is
/// used; elsewhere the result equals [`nodal_derivative`].
pub(crate) fn kink_aware_derivative<T: Scalar>(grid: &[T], values: &[T]) -> Vec<T> {
    const KINK_RATIO: f64 = 4.0;
    let mut d = nodal_derivative(grid, values);
    let n = grid.len();
    if n < 5 {
        return d;
    }
    let s: Vec<T> = (0..n - 1).map(|k| (values[k + 1] - values[k]) / (grid[k + 1] - grid[k])).collect();
    let scale = s.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let tiny: T = lit::<T>(1e-12) * (T::one() + scale);
    for i in 2..n - 2 {
        let (sl, sr) = (s[i - 1], s[i]);
        let left = (sl - s[i - 2]).abs();
        let right = (s[i + 1] - sr).abs();
        if (sr - sl).abs() > lit::<T>(KINK_RATIO) * left.min(right) + tiny {
            d[i] = if left <= right { sl } else { sr };
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locate_finds_cells() {
        let g = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(locate(&g, 0.0), 0);
        assert_eq!(locate(&g, 0.5), 0);
        assert_eq!(locate(&g, 1.0), 0);
        assert_eq!(locate(&g, 1.5), 1);
        assert_eq!(locate(&g, 3.0), 2);
    }

    #[test]
    fn nodal_derivative_exact_for_quadratics() {
        let g = [0.0, 0.3, 1.0, 1.2, 2.0];
        let v: Vec<f64> = g.iter().map(|x| x * x).collect();
        let d = nodal_derivative(&g, &v);
        for i in 1..4 {
            assert!((d[i] - 2.0 * g[i]).abs() < 1e-12, "{i}");
        }
    }

    #[test]
    fn kink_aware_derivative_is_one_sided_at_kinks() {
        let g: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        // Kink at 0.45, inside the cell [0.4, 0.5].
        let v: Vec<f64> = g.iter().map(|&x| if x < 0.45 { x } else { 0.9 - x }).collect();
        let d = kink_aware_derivative(&g, &v);
        assert!((d[4] - 1.0).abs() < 1e-12 && (d[5] + 1.0).abs() < 1e-12, "{d:?}");
        let q: Vec<f64> = g.iter().map(|x| x * x).collect();
        assert_eq!(kink_aware_derivative(&g, &q), nodal_derivative(&g, &q));
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median([3.0, 1.0, 2.0].into_iter()), Some(2.0));
        assert_eq!(median([4.0, 1.0, 2.0, 3.0].into_iter()), Some(2.5));
        assert_eq!(median(std::iter::empty::<f64>()), None);
    }
}
