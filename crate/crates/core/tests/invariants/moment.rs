use eigensteer::control::{Control, Windowed};
use eigensteer::moment::{
    build_moment_problem, build_moment_problem_in_frame, control_l2_norm, cost_of, empirical_cost, eval_control,
    gram_matrix, solve_min_norm, ControlSignal, N_CTRL_CAP,
};
use eigensteer::simulator::simulate_linear_duhamel;
use eigensteer::spectral::{gallery, make_dirichlet_x2};
use eigensteer::Error;

use crate::common::*;

#[test]
fn scalar_cost() {
    let p = make_dirichlet_x2();
    for t in [0.1, 1.0] {
        let c = empirical_cost(&p, 1, t, 1).unwrap();
        assert!((c - 1.0 / (p.b_entry(1, 1).unwrap().abs() * t.sqrt())).abs() < 1e-12 * c);
        // Frame λ_2: the single frequency λ_1 - λ_2 is negative.
        let c2 = empirical_cost(&p, 2, t, 1).unwrap();
        let sigma = p.eigenvalue(1) - p.eigenvalue(2);
        let expected = (-sigma * t).exp().max(1.0) / (p.b_entry(2, 1).unwrap().abs() * t.sqrt());
        assert!((c2 - expected).abs() < 1e-12 * expected);
    }
}

#[test]
fn scalar_moment_identity() {
    let p = make_dirichlet_x2();
    let mp = build_moment_problem(&p, 1, &[0.3], 0.5, 1).unwrap();
    let cs = solve_min_norm(&mp).unwrap();
    // ω = 0 and q ≡ m/T.
    let m = 0.3 / p.b_entry(1, 1).unwrap();
    assert!((cs.coefficients[0] - m / 0.5).abs() < 1e-14);
    let y = simulate_linear_duhamel(&p, 1, &[0.3], &cs).unwrap();
    assert!(y[0].abs() < 1e-15);
}

#[test]
fn cap_and_argument_errors() {
    let p = make_dirichlet_x2();
    let n = N_CTRL_CAP + 1;
    assert!(matches!(
        build_moment_problem(&p, 1, &vec![0.0; n], 1.0, n),
        Err(Error::ModeCapExceeded { requested: 17, cap: 16 })
    ));
    assert!(build_moment_problem(&p, 1, &[1.0, 2.0], 1.0, 3).is_err());
    assert!(build_moment_problem(&p, 1, &[1.0], 0.0, 1).is_err());
}

#[test]
fn zero_signal_and_window_queries() {
    let z = ControlSignal::zero(0.5, 1.0);
    assert_eq!(eval_control(&z, 1.25).unwrap(), 0.0);
    assert!(matches!(eval_control(&z, 2.0), Err(Error::OutOfWindow { .. })));
    assert!(eval_control(&z, 0.5).is_err());
    assert_eq!(z.support(), (1.0, 1.5));
    assert!(z.vanishes_on(0.0, 10.0));
}

#[test]
fn single_term_at_window_end() {
    let p = make_dirichlet_x2();
    let mp = build_moment_problem_in_frame(&p, 1, &[0.2], 0.4, 1, p.eigenvalue(2)).unwrap();
    let cs = solve_min_norm(&mp).unwrap().with_offset(3.0);
    let expected = cs.coefficients[0] * (-cs.shift_lambda * 0.4).exp();
    assert!((eval_control(&cs, 3.4).unwrap() - expected).abs() < 1e-13 * expected.abs());
    assert_eq!(cs.value(3.41), 0.0);
}

#[test]
fn q_bounded_by_coefficient_sum() {
    let p = make_dirichlet_x2();
    let y0: Vec<f64> = (0..10).map(|i| (i as f64 * 0.7).sin() * 1e-2).collect();
    let cs = solve_min_norm(&build_moment_problem(&p, 1, &y0, 0.3, 10).unwrap()).unwrap();
    let bound: f64 = cs.coefficients.iter().map(|c| c.abs()).sum();
    for i in 0..=300 {
        let s = 0.3 * i as f64 / 300.0;
        assert!(cs.q_local(s).abs() <= bound * (1.0 + 1e-12));
    }
}

#[test]
fn control_norm_matches_quadrature() {
    let rule = Composite::new(20, 400);
    for p in gallery() {
        for (j, t) in [(1, 0.3), (2, 0.5)] {
            let n = 6;
            let mut cs = solve_min_norm(&build_moment_problem(&p, j, &vec![1e-3; n], t, n).unwrap()).unwrap();
            // A random 6-term signal on the same frequencies.
            cs.coefficients = (0..n).map(|i| ((i as f64 + 1.0) * 12.9898).sin()).collect();
            let direct = rule.integrate(|s| cs.p_local(s).powi(2), 0.0, t).sqrt();
            let closed = control_l2_norm(&cs);
            assert!(
                (closed - direct).abs() <= 1e-10 * direct,
                "{} j={j}: {closed} vs {direct}",
                p.name()
            );
        }
    }
}

#[test]
fn gram_entries_are_decay_integrals() {
    let freqs = [0.0, 3.0, 30.0];
    let g = gram_matrix(&freqs, 0.7);
    for a in 0..3 {
        for b in 0..3 {
            let expected = decay_integral(freqs[a] + freqs[b], 0.7);
            assert!((g[(a, b)] - expected).abs() <= 1e-14 * expected);
        }
    }
}

#[test]
fn shifted_frame_synthesis_controls_all_modes() {
    let p = make_dirichlet_x2();
    let y0: Vec<f64> = (0..6)
        .map(|i| if i == 1 { 0.0 } else { 1e-3 / (1 + i) as f64 })
        .collect();
    let cs = solve_min_norm(&build_moment_problem(&p, 2, &y0, 0.6, 6).unwrap()).unwrap();
    assert!(cs.shift_lambda < 0.0);
    let y = simulate_linear_duhamel(&p, 2, &y0, &cs).unwrap();
    assert!(norm(&y) <= 1e-7 * norm(&y0), "{} vs {}", norm(&y), norm(&y0));
}

#[test]
fn cost_ignores_targets() {
    let p = make_dirichlet_x2();
    let a = build_moment_problem(&p, 1, &[0.0; 6], 0.5, 6).unwrap();
    let b = build_moment_problem(&p, 1, &[1.0; 6], 0.5, 6).unwrap();
    assert_eq!(cost_of(&a).unwrap(), cost_of(&b).unwrap());
}
