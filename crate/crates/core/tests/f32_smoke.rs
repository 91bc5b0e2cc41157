use ch_core::{eul_to_lag, lag_to_eul, solve, EulerianStateF32, PeakonAntipeakon, SolverConfig};

#[test]
fn single_precision_pipeline_runs() {
    let x = EulerianStateF32::uniform_grid(-20.0, 20.0, 1201);
    let u0 = EulerianStateF32::from_fn(x, |x: f32| (-x.abs()).exp(), vec![]).unwrap();
    assert!((u0.energy() - 2.0).abs() < 1e-3);

    let back = lag_to_eul(&eul_to_lag(&u0).unwrap(), u0.x()).unwrap();
    let err = back.u().iter().zip(u0.u()).map(|(a, b)| (a - b).abs()).fold(0.0f32, f32::max);
    assert!(err < 1e-5);

    let tr = solve(&u0, &SolverConfig::new(1e-2f32, 1.0, vec![1.0])).unwrap();
    let last = &tr.snapshots[0];
    let err = u0.x().iter().map(|&x| (last.eulerian.eval_u(x) - (-(x - 1.0).abs()).exp()).abs()).fold(0.0f32, f32::max);
    assert!(err < 0.05, "{err}");
    assert!((last.eulerian.nu_total() - u0.nu_total()).abs() < 1e-4);
}

#[test]
fn single_precision_oracle_agrees_with_double() {
    let a = PeakonAntipeakon::<f32>::from_d_tstar(1.0, 1.0).unwrap();
    let b = PeakonAntipeakon::<f64>::from_d_tstar(1.0, 1.0).unwrap();
    for i in 0..50 {
        let x = -5.0 + 0.2 * i as f64;
        assert!((a.exact_u(0.5, x as f32) as f64 - b.exact_u(0.5, x)).abs() < 1e-5);
    }
}
