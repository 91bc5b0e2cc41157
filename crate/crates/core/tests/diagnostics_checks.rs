use ch_core::diagnostics::{
    check_energy, check_one_sided_lipschitz, check_single_jump, check_tv_p_along_characteristic, node_nearest, run_all, tv_along_characteristic,
    DiagnosticsConfig,
};
use ch_core::{solve, DiagnosticsReportF64, EulerianState, PeakonAntipeakon, Snapshot, SolverConfig};

fn collision(n: usize, times: Vec<f64>) -> (PeakonAntipeakon<f64>, Vec<Snapshot<f64>>) {
    let o = PeakonAntipeakon::from_d_tstar(1.0, 1.0).unwrap();
    let u0 = o.initial_state(o.fitted_grid(-20.0, 20.0, n).unwrap()).unwrap();
    let t_end = *times.last().unwrap();
    let tr = solve(&u0, &SolverConfig::new(1e-3, t_end, times)).unwrap();
    (o, tr.snapshots)
}

#[test]
fn zero_run_passes_and_report_round_trips_through_json() {
    let s = EulerianState::zero(EulerianState::uniform_grid(-5.0, 5.0, 51)).unwrap();
    let tr = solve(&s, &SolverConfig::new(0.05, 1.0, vec![0.0, 0.5, 1.0])).unwrap();
    let report = run_all(&tr.snapshots, 0.05, &DiagnosticsConfig::default());
    assert!(report.all_pass(), "{report}");
    let (tv, _) = tv_along_characteristic(&tr.snapshots, 10);
    assert_eq!(tv, 0.0);
    let back: DiagnosticsReportF64 = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(back, report);
}

#[test]
fn tampered_snapshots_are_caught() {
    let (_, snaps) = collision(512, vec![0.0, 0.25, 0.5]);
    let cfg = DiagnosticsConfig::default();
    assert!(run_all(&snaps, 1e-3, &cfg).all_pass());

    let mut more_energy = snaps.clone();
    let e = &more_energy[2].eulerian;
    let boosted: Vec<f64> = e.u().iter().map(|u| 1.1 * u).collect();
    more_energy[2].eulerian = EulerianState::new(e.x().to_vec(), boosted, vec![]).unwrap();
    let r = check_energy(&more_energy, 1e-3, &cfg);
    assert!(!r.get("energy_nonincreasing").unwrap().pass);
    assert!(!r.get("nu_conservation").unwrap().pass);
    assert_eq!(r.get("energy_nonincreasing").unwrap().t, Some(0.5));

    let mut unbroken = snaps.clone();
    unbroken[1].lagrangian.broken[3] = true;
    unbroken[1].lagrangian.tau[3] = 0.2;
    let r = run_all(&unbroken, 1e-3, &cfg);
    assert_eq!(r.failures(), vec!["broken_monotone"]);
}

#[test]
fn slope_bound_holds_after_breaking() {
    let (_, snaps) = collision(1024, (0..=20).map(|i| i as f64 * 0.1).collect());
    let h1 = snaps[0].eulerian.h1_norm();
    assert!((h1 - 2.0).abs() <= 1e-3);
    let r = check_one_sided_lipschitz(&snaps, h1, &DiagnosticsConfig::default());
    assert!(r.pass, "{r:?}");
}

#[test]
fn pressure_at_the_centre_varies_like_the_exact_one() {
    let times: Vec<f64> = (0..=30).map(|i| i as f64 * 0.05).collect();
    let (o, snaps) = collision(2048, times.clone());
    let centre = node_nearest(&snaps, 0.0);
    let exact: f64 = times.windows(2).map(|w| (o.exact_p_px(w[1], 0.0).0 - o.exact_p_px(w[0], 0.0).0).abs()).sum();
    // Rises towards D² and then drops to zero: one jump.
    assert!(exact > 1.0 && exact < 2.0);
    let r = check_tv_p_along_characteristic(&snaps, centre, None);
    assert!(r.pass && (r.residual - exact).abs() <= 0.02, "{} vs {exact}", r.residual);
    assert!(check_single_jump(&snaps, centre, 0.25).pass);
}
