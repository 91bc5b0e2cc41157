//! Exponential-kernel convolution on a monotone line in O(N).
//!
//! Both the Eulerian pressure `p = 1/4 ∫ e^{-|x-z|} f(z) dz` and its Lagrangian
//! pullbacks `P`, `Q` reduce to two one-sided sums
//!
//! ```text
//! L_j = Σ_{cells k < j} ∫_cell e^{-(z_j - z)} f,   R_j = Σ_{cells k >= j} ∫_cell e^{-(z - z_j)} f
//! ```
//!
//! which obey `L_{j+1} = L_j e^{-(z_{j+1}-z_j)} + cL_j` and the mirrored
//! recursion for `R`. Each step multiplies by a factor `<= 1`, so the scans are
//! unconditionally stable, and the sums are associated in a fixed order.

use crate::scalar::{lit, Scalar};

/// `[μ0, μ1, μ2]` with `μk(a) = ∫_0^1 ρ^k e^{-aρ} dρ`, for `a >= 0`.
///
/// Uses the Taylor series for `a <= 1` (where the closed forms cancel) and the
/// upward recurrence `μk = (k μ_{k-1} - e^{-a}) / a` otherwise.
pub fn exp_moments<T: Scalar>(a: T) -> [T; 3] {
    let a = a.max(T::zero());
    if a <= T::one() {
        let mut out = [T::zero(); 3];
        let mut term = T::one(); // (-a)^m / m!
        let tiny = T::epsilon() * lit(0.25);
        for m in 0..60 {
            let mf: T = lit(m as f64);
            let mut done = true;
            for (k, o) in out.iter_mut().enumerate() {
                let c = term / (mf + lit((k + 1) as f64));
                *o = *o + c;
                if c.abs() > tiny * o.abs() {
                    done = false;
                }
            }
            if done {
                break;
            }
            term = term * (-a) / (mf + T::one());
        }
        out
    } else {
        let e = (-a).exp();
        let m0 = -(-a).exp_m1() / a;
        let m1 = (m0 - e) / a;
        let m2 = (lit::<T>(2.0) * m1 - e) / a;
        [m0, m1, m2]
    }
}

/// `∫_0^1 e^{-decay·ρ} (c0 + c1 ρ + c2 ρ²) dρ`, scaled by `width`.
#[inline]
pub fn quadratic_cell_integral<T: Scalar>(width: T, decay: T, c: [T; 3]) -> T {
    let m = exp_moments(decay);
    width * (c[0] * m[0] + c[1] * m[1] + c[2] * m[2])
}

/// Left/right one-sided exponential sums at each node.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpScan<T> {
    pub left: Vec<T>,
    pub right: Vec<T>,
}

impl<T: Scalar> ExpScan<T> {
    /// `1/4 (L + R)`: the symmetric kernel sum.
    pub fn symmetric(&self) -> Vec<T> {
        let quarter: T = lit(0.25);
        self.left
            .iter()
            .zip(&self.right)
            .map(|(&l, &r)| quarter * (l + r))
            .collect()
    }

    /// `-1/4 (L - R)`: the kernel sum weighted by `-sign(z_j - z)`.
    pub fn antisymmetric(&self) -> Vec<T> {
        let quarter: T = lit(0.25);
        self.left
            .iter()
            .zip(&self.right)
            .map(|(&l, &r)| -quarter * (l - r))
            .collect()
    }
}

/// Runs both recursions over `positions` (nondecreasing; negative gaps are
/// treated as zero). `anchored_right[k]` is cell `k`'s integral against
/// `e^{-(z_{k+1} - z)}`, `anchored_left[k]` against `e^{-(z - z_k)}`.
pub fn exp_scan<T: Scalar>(positions: &[T], anchored_right: &[T], anchored_left: &[T]) -> ExpScan<T> {
    let n = positions.len();
    debug_assert_eq!(anchored_right.len(), n.saturating_sub(1));
    debug_assert_eq!(anchored_left.len(), n.saturating_sub(1));
    let mut left = vec![T::zero(); n];
    let mut right = vec![T::zero(); n];
    if n < 2 {
        return ExpScan { left, right };
    }
    let decay: Vec<T> = positions
        .windows(2)
        .map(|w| (-(w[1] - w[0]).max(T::zero())).exp())
        .collect();
    for k in 0..n - 1 {
        left[k + 1] = left[k] * decay[k] + anchored_right[k];
    }
    for k in (0..n - 1).rev() {
        right[k] = right[k + 1] * decay[k] + anchored_left[k];
    }
    ExpScan { left, right }
}
