use ch_core::diagnostics::{check_c2_identity, check_tv_p_along_characteristic, node_nearest, run_all, DiagnosticsConfig};
use ch_core::{breaking_profile, compute_pq, eul_to_lag, evolution::rhs, solve, Atom, EulerianState, PeakonAntipeakon, SolverConfig};

fn peakon(n: usize) -> EulerianState<f64> {
    EulerianState::from_fn(EulerianState::uniform_grid(-20.0, 20.0, n), |x: f64| (-x.abs()).exp(), vec![]).unwrap()
}

fn tenths(t_end: f64) -> Vec<f64> {
    (0..=(t_end * 10.0).round() as usize).map(|i| i as f64 * 0.1).collect()
}

#[test]
fn zero_data_stays_zero() {
    let s = EulerianState::zero(EulerianState::uniform_grid(-5.0, 5.0, 101)).unwrap();
    let tr = solve(&s, &SolverConfig::new(1e-2, 1.0, vec![0.0, 0.5, 1.0])).unwrap();
    assert_eq!(tr.snapshots.len(), 3);
    for snap in &tr.snapshots {
        assert!(snap.eulerian.u().iter().all(|&u| u == 0.0));
        assert_eq!(snap.eulerian.nu_total(), 0.0);
    }
    assert!(tr.events.is_empty());
}

#[test]
fn crest_characteristic_moves_with_unit_speed() {
    let x = eul_to_lag(&peakon(2001)).unwrap();
    let r = rhs(&x, &compute_pq(&x).unwrap());
    let crest = x.y.iter().position(|&y| y == 0.0).unwrap();
    assert!((r.y[crest] - 1.0).abs() <= 1e-12);
}

#[test]
fn single_peakon_travels_without_breaking() {
    let u0 = peakon(4097);
    let tr = solve(&u0, &SolverConfig::new(1e-3, 2.0, tenths(2.0))).unwrap();
    let last = tr.snapshots.last().unwrap();
    assert_eq!(last.t, 2.0);
    let err = u0.x().iter().map(|&x| (last.eulerian.eval_u(x) - (-(x - 2.0).abs()).exp()).abs()).fold(0.0, f64::max);
    assert!(err <= 0.01, "sup error {err}");
    assert!(breaking_profile(&tr).iter().all(|&(_, tau)| tau == f64::INFINITY));

    let f0 = tr.snapshots[0].eulerian.energy();
    assert!((f0 - 2.0).abs() <= 1e-3);
    for s in &tr.snapshots {
        assert!((s.eulerian.energy() - f0).abs() <= 1e-4, "t = {}", s.t);
    }
    let crest = node_nearest(&tr.snapshots, 0.0);
    assert!(check_tv_p_along_characteristic(&tr.snapshots, crest, Some(0.01)).pass);
    let report = run_all(&tr.snapshots, 1e-3, &DiagnosticsConfig::default());
    assert!(report.all_pass(), "{report}");
}

#[test]
fn c2_residual_shrinks_fast_under_dt_refinement() {
    let u0 = peakon(1024);
    let residual = |dt: f64| {
        let tr = solve(&u0, &SolverConfig::new(dt, 1.0, vec![1.0])).unwrap();
        check_c2_identity(&tr.snapshots, 1.0).residual
    };
    let (coarse, fine) = (residual(4e-2), residual(2e-2));
    let order = (coarse / fine).log2();
    assert!(order >= 3.0, "coarse {coarse:e}, fine {fine:e}, order {order}");
}

#[test]
fn initial_atoms_are_broken_from_the_start() {
    let u0 = peakon(801).with_atoms(vec![Atom::new(3.0, 0.5)]).unwrap();
    let x0 = eul_to_lag(&u0).unwrap();
    let plateau: Vec<usize> = (0..x0.len()).filter(|&j| x0.y[j] == 3.0 && x0.y_xi[j] == 0.0).collect();
    assert!(plateau.len() >= 2);
    let tr = solve(&u0, &SolverConfig::new(1e-2, 0.1, vec![0.1])).unwrap();
    let profile = breaking_profile(&tr);
    for &j in &plateau {
        assert_eq!(profile[j].1, 0.0);
    }
}

#[test]
fn collision_breaks_at_the_predicted_time() {
    let o = PeakonAntipeakon::from_d_tstar(1.0, 1.0).unwrap();
    let u0 = o.initial_state(o.fitted_grid(-20.0, 20.0, 2048).unwrap()).unwrap();
    let cfg = SolverConfig::new(1e-3, 1.5, vec![1.5]);
    let tr = solve(&u0, &cfg).unwrap();
    let first = tr.events.iter().map(|e| e.tau).fold(f64::INFINITY, f64::min);
    assert!((first - 1.0).abs() <= 0.01, "first break at {first}");
    let u_max = tr.snapshots[0].eulerian.u().iter().fold(0.0f64, |m, &u| m.max(u.abs()));
    assert!(u_max <= 0.02);

    let with_atom = solve(&u0.with_atoms(vec![Atom::new(0.0, 1.0)]).unwrap(), &cfg).unwrap();
    let tau_min = |p: Vec<(f64, f64)>| p.iter().map(|&(_, t)| t).filter(|&t| t > 0.0).fold(f64::INFINITY, f64::min);
    let (a, b) = (tau_min(breaking_profile(&tr)), tau_min(breaking_profile(&with_atom)));
    assert!((a - b).abs() <= cfg.dt, "{a} vs {b}");
}

#[test]
fn oracle_pressure_matches_quadrature_of_sampled_u() {
    let o = PeakonAntipeakon::<f64>::from_d_tstar(1.0, 1.0).unwrap();
    let s = o.state_at(0.5, o.fitted_grid_at(0.5, -20.0, 20.0, 8192).unwrap()).unwrap();
    let (p, px) = s.p_px_grid();
    for (i, &x) in s.x().iter().enumerate() {
        let (pe, pxe) = o.exact_p_px(0.5, x);
        assert!((p[i] - pe).abs() <= 1e-6 && (px[i] - pxe).abs() <= 1e-6, "x = {x}: ({}, {}) vs ({pe}, {pxe})", p[i], px[i]);
    }
    for i in (0..s.len()).step_by(41) {
        let (a, b) = s.compute_p_px(s.x()[i]).unwrap();
        assert!((a - p[i]).abs() <= 1e-12 && (b - px[i]).abs() <= 1e-12);
    }
}
