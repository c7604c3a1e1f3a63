use eigensteer::control::{ConstantControl, PiecewiseControl, ZeroControl};
use eigensteer::moment::{build_moment_problem, control_l2_norm, solve_min_norm};
use eigensteer::simulator::{
    apriori_c1, check_apriori_w, simulate_bilinear, simulate_linear_duhamel, simulate_shifted, GalerkinSystem,
    SimConfig,
};
use eigensteer::spectral::{gallery, make_dirichlet_x2, make_neumann_x2};
use eigensteer::verify::strang_order_ratio;
use eigensteer::Error;
use nalgebra::DMatrix;

use crate::common::*;

#[test]
fn free_eigensolution_is_exact() {
    let p = make_dirichlet_x2();
    let cfg = SimConfig {
        n_sim: 6,
        ..SimConfig::default()
    };
    let traj = simulate_bilinear(&p, &[0.0, 0.0, 1.0], &ZeroControl, (0.0, 0.2), &cfg).unwrap();
    let u = traj.final_state();
    assert_eq!(u[2], (-p.eigenvalue(3) * 0.2).exp());
    assert!(u.iter().enumerate().all(|(i, x)| i == 2 || *x == 0.0));
}

#[test]
fn two_mode_constant_control_matches_matrix_exponential() {
    for p in [make_dirichlet_x2(), make_neumann_x2()] {
        let p0 = 1.7;
        let t = 0.4;
        let b = p.b_matrix(2).unwrap();
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(p.eigenvalues(2)));
        let m = (-(a + b * p0) * t).exp();
        let u0 = nalgebra::DVector::from_vec(vec![0.6, -0.8]);
        let exact = m * &u0;
        let cfg = SimConfig {
            n_sim: 2,
            dt_max: 1e-3,
            ..SimConfig::default()
        };
        let traj = simulate_bilinear(&p, u0.as_slice(), &ConstantControl(p0), (0.0, t), &cfg).unwrap();
        let err = norm(
            &traj
                .final_state()
                .iter()
                .zip(exact.iter())
                .map(|(x, y)| x - y)
                .collect::<Vec<_>>(),
        );
        assert!(err < 1e-8, "{}: {err}", p.name());
    }
}

#[test]
fn second_order_on_time_varying_control() {
    let r = strang_order_ratio(&make_dirichlet_x2(), 8, 1e-2).unwrap();
    assert!((3.5..=4.5).contains(&r), "{r}");
}

#[test]
fn shifted_frame_commutes_with_original() {
    let p = make_dirichlet_x2();
    let j = 2;
    let v0 = [0.0, 0.0, 1e-2, 0.0, -1e-2];
    let cfg = SimConfig {
        n_sim: 10,
        ..SimConfig::default()
    };
    let window = (0.0, 0.3);
    let control = ConstantControl(2.0);
    let v = simulate_shifted(&p, j, &v0, &control, window, &cfg).unwrap();
    let mut u0 = v0.to_vec();
    u0[j - 1] += 1.0;
    let u = simulate_bilinear(&p, &u0, &control, window, &cfg).unwrap();
    let scale = (-p.eigenvalue(j) * 0.3).exp();
    for (k, (vu, uu)) in v.final_state().iter().zip(u.final_state()).enumerate() {
        let z = if k == j - 1 { vu + 1.0 } else { *vu };
        assert!((z * scale - uu).abs() < 1e-9 * scale, "mode {k}");
    }
}

#[test]
fn duhamel_agrees_with_stepper_on_gallery() {
    for p in gallery() {
        let d = eigensteer::verify::duhamel_vs_stepper(&p, 1, 1e-3).unwrap();
        assert!(d <= 1e-6, "{}: {d}", p.name());
    }
}

#[test]
fn spillover_bounded_by_gronwall_form() {
    let p = make_dirichlet_x2();
    let (n_ctrl, n_sim, t) = (8, 24, 0.4);
    let j = 1;
    let mut v0: Vec<f64> = (0..n_ctrl)
        .map(|i| if i == 0 { 0.0 } else { 2e-3 / i as f64 })
        .collect();
    let cs = solve_min_norm(&build_moment_problem(&p, j, &v0, t, n_ctrl).unwrap()).unwrap();
    v0.resize(n_sim, 0.0);
    let system = GalerkinSystem::new(&p, n_sim, p.eigenvalue(j), Some(j)).unwrap();
    let cfg = SimConfig {
        n_sim,
        ..SimConfig::default()
    };
    let traj = system.integrate(&v0, &cs, (0.0, t), &cfg).unwrap();
    let tail = norm(&traj.final_state()[n_ctrl..]);
    // Free decay of the (zero) tail plus ‖B‖ ‖p‖_{L¹} sup‖v + φ_j‖.
    let l1 = t.sqrt() * control_l2_norm(&cs);
    assert!(tail <= p.b_norm * l1 * traj.sup_offset_norm, "{tail}");
}

#[test]
fn apriori_examples() {
    assert!((apriori_c1(1.0, 0.5, 0.0, 1.0, 0.0) - 1f64.exp()).abs() < 1e-15);
    let zero = check_apriori_w(&make_dirichlet_x2(), 0.0, 0.0, 1.0, 5.0, 0.0);
    assert!(zero.holds && zero.precondition);
    let a = check_apriori_w(&make_dirichlet_x2(), 0.0, 0.1, 0.5, 2.0, 0.0);
    let b = check_apriori_w(&make_dirichlet_x2(), 0.0, 0.2, 0.5, 2.0, 0.0);
    assert!((b.bound / a.bound - 4.0).abs() < 1e-12);
    assert!(!check_apriori_w(&make_dirichlet_x2(), 0.0, 1.0, 0.5, 2.0, 0.0).precondition);
}

#[test]
fn linear_mode_needs_target_index() {
    let p = make_dirichlet_x2();
    let s = GalerkinSystem::new(&p, 4, 0.0, None).unwrap();
    assert!(s
        .integrate_linear(&[1.0], &ZeroControl, (0.0, 1.0), &SimConfig::default())
        .is_err());
}

#[test]
fn step_limit_and_bad_windows() {
    let p = make_dirichlet_x2();
    let cfg = SimConfig {
        n_sim: 4,
        max_steps: 10,
        ..SimConfig::default()
    };
    assert!(matches!(
        simulate_bilinear(&p, &[1.0], &ConstantControl(1.0), (0.0, 1.0), &cfg),
        Err(Error::StepLimit { .. })
    ));
    assert!(simulate_bilinear(&p, &[1.0], &ZeroControl, (1.0, 0.0), &cfg).is_err());
    assert!(simulate_bilinear(&p, &[1.0; 5], &ZeroControl, (0.0, 1.0), &cfg).is_err());
}

#[test]
fn stiffness_error_for_huge_controls() {
    let p = make_dirichlet_x2();
    let cfg = SimConfig {
        n_sim: 4,
        ..SimConfig::default()
    };
    assert!(matches!(
        simulate_bilinear(&p, &[1.0], &ConstantControl(1e8), (0.0, 1.0), &cfg),
        Err(Error::Stiffness { .. })
    ));
}

#[test]
fn piecewise_zero_control_is_free_flow() {
    let p = make_dirichlet_x2();
    let cfg = SimConfig {
        n_sim: 3,
        ..SimConfig::default()
    };
    let empty: PiecewiseControl<eigensteer::moment::ControlSignal> = PiecewiseControl::default();
    let traj = simulate_bilinear(&p, &[1.0, 1.0], &empty, (0.0, 0.1), &cfg).unwrap();
    assert_eq!(traj.steps, 1);
    assert_eq!(traj.final_state()[1], (-p.eigenvalue(2) * 0.1).exp());
}

#[test]
fn duhamel_zero_control() {
    let p = make_dirichlet_x2();
    let cs = eigensteer::moment::ControlSignal::zero(0.3, 0.0);
    let y = simulate_linear_duhamel(&p, 1, &[1.0, 2.0], &cs).unwrap();
    assert_eq!(y[1], 2.0 * (-p.eigenvalue(2) * 0.3).exp());
}
