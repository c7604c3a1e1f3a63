use eigensteer::constants::SteeringConstants;
use eigensteer::control::Control;
use eigensteer::simulator::frame_sigma;
use eigensteer::spectral::make_dirichlet_x2;
use eigensteer::steering::{
    deviation_norm_at, free_decay_time, log_r1, steer_local, steer_semiglobal, steer_to_projection, SteerFailure,
    StopReason,
};
use eigensteer::Error;

use crate::common::*;

fn datum(j: usize, eps: f64) -> Vec<f64> {
    let mut u = vec![0.0; j + 1];
    u[j - 1] = 1.0;
    u[j] = eps;
    u
}

#[test]
fn eigenfunction_needs_no_windows() {
    let p = make_dirichlet_x2();
    for j in [1, 3] {
        let out = steer_local(&p, j, &datum(j, 0.0), 1.0, &auto_config(&p, j)).unwrap();
        assert_eq!(out.report.windows_used, 0);
        assert_eq!(out.report.stop, StopReason::AlreadyOnTarget);
        assert!(out.control.pieces.is_empty());
        assert_eq!(out.report.final_error, 0.0);
    }
}

#[test]
fn windows_follow_schedule() {
    let p = make_dirichlet_x2();
    let cfg = auto_config(&p, 1);
    let out = steer_local(&p, 1, &[1.0, 0.0, 2e-3, 0.0, 1e-3], 0.8, &cfg).unwrap();
    assert!(out.report.converged());
    let sigma = frame_sigma(&p, p.eigenvalue(1));
    let c = SteeringConstants::new(&cfg.cost_model, p.b_norm, sigma, 0.8).unwrap();
    let mut tau = 0.0;
    for w in &out.report.windows {
        let n = w.n as f64;
        assert!((w.t_n - c.t1 / (n * n)).abs() <= 1e-14);
        assert!((w.tau_start - tau).abs() <= 1e-14);
        tau += c.t1 / (n * n);
        assert!((w.tau_end - tau).abs() <= 1e-14);
    }
    assert!(out.report.tau_end <= c.tf);
    assert_eq!(out.report.final_time, c.tf);
}

#[test]
fn control_vanishes_after_last_window() {
    let p = make_dirichlet_x2();
    let out = steer_local(&p, 1, &datum(1, 1e-3), 1.0, &auto_config(&p, 1)).unwrap();
    let end = out.control.support_end().unwrap();
    assert_eq!(end, out.report.tau_end);
    for i in 1..=100 {
        assert_eq!(out.control.value(end + i as f64 * 1e-2), 0.0);
    }
    assert!(out.control.vanishes_on(end, end + 10.0));
}

#[test]
fn smaller_data_need_less_energy() {
    let p = make_dirichlet_x2();
    let cfg = auto_config(&p, 1);
    let big = steer_local(&p, 1, &datum(1, 1e-3), 1.0, &cfg).unwrap().report;
    let small = steer_local(&p, 1, &datum(1, 1e-4), 1.0, &cfg).unwrap().report;
    assert!(
        small.total_p_sq * 10.0 <= big.total_p_sq,
        "{} vs {}",
        small.total_p_sq,
        big.total_p_sq
    );
}

#[test]
fn final_error_matches_free_tail() {
    let p = make_dirichlet_x2();
    let out = steer_local(&p, 2, &[0.0, 1.0, 0.0, 1e-3], 1.0, &auto_config(&p, 2)).unwrap();
    let r = &out.report;
    let e = deviation_norm_at(&p, 2, &out.final_deviation, r.tau_end, r.final_time);
    assert!((e - r.final_error).abs() <= 1e-15 + 1e-12 * r.final_error);
}

#[test]
fn decay_time_branches() {
    let p = make_dirichlet_x2();
    let lr1 = (1e-3f64).ln();
    assert_eq!(free_decay_time(&p, 1e-3, lr1), 0.0);
    assert_eq!(free_decay_time(&p, 1e-4, lr1), 0.0);
    let r = 1e-3 * (p.eigenvalue(2) - p.eigenvalue(1)).exp();
    assert!((free_decay_time(&p, r, lr1) - 1.0).abs() < 1e-12);
}

#[test]
fn r1_from_theory_or_override() {
    let p = make_dirichlet_x2();
    let mut cfg = auto_config(&p, 1);
    let (lr, theory) = log_r1(&p, &cfg).unwrap();
    assert!(theory);
    let sigma = frame_sigma(&p, p.eigenvalue(1));
    let c = SteeringConstants::new(&cfg.cost_model, p.b_norm, sigma, 1.0).unwrap();
    assert!((lr - (c.log_rt - 0.5 * 2f64.ln())).abs() < 1e-12 * lr.abs());
    cfg.r1_override = Some(0.25);
    assert_eq!(log_r1(&p, &cfg).unwrap(), (0.25f64.ln(), false));
    cfg.r1_override = Some(-1.0);
    assert!(log_r1(&p, &cfg).is_err());
}

#[test]
fn semiglobal_total_time() {
    let p = make_dirichlet_x2();
    let mut cfg = auto_config(&p, 1);
    cfg.r1_override = Some(1e-3);
    let out = steer_semiglobal(&p, &[1.0, 0.0, 0.5], 0.5, &cfg).unwrap();
    let r = &out.report;
    assert!((r.total_time - (r.t_r + 1.0)).abs() < 1e-15);
    assert!(r.log_post_decay_norm < r.log_decay_threshold);
    assert!(r.terminal_error_z <= 1e-10);
    assert!(r.flags.iter().any(|f| f == "r1-override"));
}

#[test]
fn semiglobal_preconditions() {
    let p = make_dirichlet_x2();
    let mut cfg = auto_config(&p, 1);
    cfg.r1_override = Some(1e-3);
    assert!(matches!(
        steer_semiglobal(&p, &[1.0, 2.0], 1.0, &cfg),
        Err(SteerFailure::Precondition(_))
    ));
    assert!(matches!(
        steer_semiglobal(&p, &[1.1, 0.1], 1.0, &cfg),
        Err(SteerFailure::Precondition(_))
    ));
    assert!(matches!(
        steer_semiglobal(&p, &[1.0, 0.1], 0.0, &cfg),
        Err(SteerFailure::Failed(Error::InvalidArgument(_)))
    ));
}

#[test]
fn cone_trivial_cases() {
    let p = make_dirichlet_x2();
    let mut cfg = auto_config(&p, 1);
    cfg.r1_override = Some(1e-3);
    let zero = steer_to_projection(&p, &[0.0], 1.0, &cfg).unwrap();
    assert_eq!(zero.report.total_time, 0.0);
    assert!(zero.control.pieces.is_empty());
    let on_ray = steer_to_projection(&p, &[2.0], 1.0, &cfg).unwrap();
    assert_eq!(on_ray.report.gamma, 2.0);
    assert_eq!(on_ray.report.terminal_error_z, 0.0);
    assert!(matches!(
        steer_to_projection(&p, &[0.5, 1.0], 1.0, &cfg),
        Err(SteerFailure::Precondition(_))
    ));
}

#[test]
fn argument_errors() {
    let p = make_dirichlet_x2();
    let mut cfg = auto_config(&p, 1);
    assert!(matches!(
        steer_local(&p, 0, &[1.0], 1.0, &cfg),
        Err(SteerFailure::Failed(Error::InvalidArgument(_)))
    ));
    assert!(matches!(
        steer_local(&p, 11, &[1.0], 1.0, &cfg),
        Err(SteerFailure::Failed(Error::InvalidArgument(_)))
    ));
    assert!(steer_local(&p, 1, &vec![0.0; 31], 1.0, &cfg).is_err());
    cfg.n_ctrl = 17;
    assert!(matches!(
        steer_local(&p, 1, &[1.0], 1.0, &cfg),
        Err(SteerFailure::Failed(Error::ModeCapExceeded { .. }))
    ));
}

#[test]
fn strict_mode_rejects_data_outside_theory() {
    let p = make_dirichlet_x2();
    let mut cfg = auto_config(&p, 1);
    let relaxed = steer_local(&p, 1, &datum(1, 1e-3), 1.0, &cfg).unwrap();
    assert!(relaxed.report.outside_theory);
    assert!(relaxed.report.flags.iter().any(|f| f == "outside-theory"));
    cfg.strict = true;
    assert!(matches!(
        steer_local(&p, 1, &datum(1, 1e-3), 1.0, &cfg),
        Err(SteerFailure::Precondition(_))
    ));
}
