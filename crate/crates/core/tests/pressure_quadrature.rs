//! The O(N) exponential scans against direct O(N²) Gauss–Legendre sums.

use ch_core::{compute_pq, eul_to_lag, solve, EulerianState, LagrangianState, PeakonAntipeakon, SolverConfig};

/// 8-point Gauss–Legendre nodes and weights on [-1, 1].
const GL: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_27),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_27),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
];

/// Integrates `f` over `[a, b]` with two 8-point panels.
fn gauss(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut s = 0.0;
    for (lo, hi) in [(a, 0.5 * (a + b)), (0.5 * (a + b), b)] {
        let (m, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        s += GL.iter().map(|&(z, w)| w * f(m + r * z)).sum::<f64>() * r;
    }
    s
}

fn direct_eulerian(state: &EulerianState<f64>) -> (Vec<f64>, Vec<f64>) {
    let (x, u) = (state.x(), state.u());
    let mut p = vec![0.0; x.len()];
    let mut px = vec![0.0; x.len()];
    for (i, &xi) in x.iter().enumerate() {
        for k in 0..x.len() - 1 {
            let s = (u[k + 1] - u[k]) / (x[k + 1] - x[k]);
            let dens = |z: f64| {
                let v = u[k] + s * (z - x[k]);
                2.0 * v * v + s * s
            };
            let w = gauss(x[k], x[k + 1], |z| (-(xi - z).abs()).exp() * dens(z));
            p[i] += 0.25 * w;
            px[i] += if x[k + 1] <= xi { -0.25 * w } else { 0.25 * w };
        }
    }
    (p, px)
}

fn direct_lagrangian(st: &LagrangianState<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = st.len();
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    for j in 0..n {
        for k in 0..n - 1 {
            let h = st.xi[k + 1] - st.xi[k];
            let ybar = (st.y[k + 1] - st.y[k]).max(0.0) / h;
            let vbar = st.cell_ac_energy(k) / h;
            let dens = |eta: f64| {
                let th = (eta - st.xi[k]) / h;
                let uu = st.u[k] + th * (st.u[k + 1] - st.u[k]);
                let yy = st.y[k] + th * (st.y[k + 1] - st.y[k]);
                (-(st.y[j] - yy).abs()).exp() * (uu * uu * ybar + vbar)
            };
            let w = gauss(st.xi[k], st.xi[k + 1], dens);
            p[j] += 0.25 * w;
            q[j] += if k < j { -0.25 * w } else { 0.25 * w };
        }
    }
    (p, q)
}

fn max_rel(a: &[f64], b: &[f64], scale: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

#[test]
fn eulerian_scan_matches_direct_sum() {
    let x = EulerianState::uniform_grid(-15.0, 15.0, 1200);
    let u = EulerianState::from_fn(x, |x: f64| (-x.abs()).exp() - 0.4 * (-(x - 2.0).powi(2)).exp() * x.sin(), vec![]).unwrap();
    let (p, px) = u.p_px_grid();
    let (pd, pxd) = direct_eulerian(&u);
    let scale = pd.iter().cloned().fold(0.0, f64::max);
    assert!(max_rel(&p, &pd, scale) <= 1e-12, "p {}", max_rel(&p, &pd, scale));
    assert!(max_rel(&px, &pxd, scale) <= 1e-12, "p_x {}", max_rel(&px, &pxd, scale));
}

#[test]
fn lagrangian_scan_matches_direct_sum_before_breaking() {
    let o = PeakonAntipeakon::from_d_tstar(1.0, 1.0).unwrap();
    let st = eul_to_lag(&o.initial_state(o.fitted_grid(-12.0, 12.0, 900).unwrap()).unwrap()).unwrap();
    let pq = compute_pq(&st).unwrap();
    let (pd, qd) = direct_lagrangian(&st);
    let scale = pd.iter().cloned().fold(0.0, f64::max);
    assert!(max_rel(&pq.p, &pd, scale) <= 1e-12);
    assert!(max_rel(&pq.q, &qd, scale) <= 1e-12);
}

#[test]
fn lagrangian_scan_matches_direct_sum_with_plateaus() {
    let o = PeakonAntipeakon::from_d_tstar(1.0, 0.3).unwrap();
    let x = o.fitted_grid(-20.0, 20.0, 700).unwrap();
    let u0 = o.initial_state(x).unwrap().with_atoms(vec![ch_core::Atom::new(4.0, 0.7)]).unwrap();
    let tr = solve(&u0, &SolverConfig::new(1e-3, 0.5, vec![0.5])).unwrap();
    let st = &tr.final_state;
    assert!(st.broken.iter().any(|&b| b));
    let pq = compute_pq(st).unwrap();
    let (pd, qd) = direct_lagrangian(st);
    let scale = pd.iter().cloned().fold(0.0, f64::max);
    assert!(max_rel(&pq.p, &pd, scale) <= 1e-12);
    assert!(max_rel(&pq.q, &qd, scale) <= 1e-12);
}

#[test]
fn lagrangian_pressure_tracks_the_eulerian_pressure_along_characteristics() {
    let x = EulerianState::uniform_grid(-20.0, 20.0, 4001);
    let u = EulerianState::from_fn(x, |x: f64| (-x.abs()).exp(), vec![]).unwrap();
    let st = eul_to_lag(&u).unwrap();
    let pq = compute_pq(&st).unwrap();
    let crest = st.y.iter().position(|&y| y == 0.0).unwrap();
    assert!((pq.p[crest] - 0.5).abs() <= 1e-5 && pq.q[crest].abs() <= 1e-12);
    for j in (0..st.len()).step_by(97) {
        let (p, px) = u.compute_p_px(st.y[j]).unwrap();
        // The two discretizations spread the cell energy differently.
        assert!((pq.p[j] - p).abs() <= 2e-5, "node {j}: {} vs {p}", pq.p[j]);
        assert!((pq.q[j] - px).abs() <= 2e-5, "node {j}: {} vs {px}", pq.q[j]);
    }
}

