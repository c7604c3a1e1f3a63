//! Self-check suite behind `eigensteer verify`.
//!
//! Each check compares library output with an independent evaluation
//! (quadrature, closed forms, exact integer identities or a refined run).

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::config::resolve_cost_model;
use crate::config::Param;
use crate::constants::{compute_gm, compute_suffcond, log_kt, weighted_sum_identity, SteeringConstants};
use crate::control::{Control, ZeroControl};
use crate::moment::{build_moment_problem, cost_of, gram_matrix, solve_min_norm, N_CTRL_CAP};
use crate::numerics::norm;
use crate::quadrature::integrate;
use crate::simulator::{frame_sigma, simulate_linear_duhamel, GalerkinSystem, SimConfig};
use crate::spectral::{gallery, verify_gap, verify_gap_relative, ProblemKind, SpectralProblem};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub problem: Option<String>,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, problem: Option<&SpectralProblem>, passed: bool, detail: String) -> Self {
        Check {
            name: name.into(),
            problem: problem.map(|p| p.name().to_string()),
            passed,
            detail,
        }
    }
}

/// Coupling entry from the defining integral, by quadrature in the natural
/// variable of each problem.
pub fn coupling_by_quadrature(problem: &SpectralProblem, j: usize, k: usize) -> f64 {
    let (jf, kf) = (j as f64, k as f64);
    let f: Box<dyn Fn(f64) -> f64> = match problem.kind {
        ProblemKind::DirichletX2 => Box::new(move |x: f64| 2.0 * x * x * (jf * PI * x).sin() * (kf * PI * x).sin()),
        ProblemKind::NeumannX2 => {
            let phi = |m: f64, x: f64| {
                if m == 0.0 {
                    1.0
                } else {
                    2f64.sqrt() * (m * PI * x).cos()
                }
            };
            Box::new(move |x: f64| x * x * phi(jf - 1.0, x) * phi(kf - 1.0, x))
        }
        ProblemKind::RadialX2 => Box::new(move |r: f64| {
            let phi = |m: f64| (m * PI * r).sin() / ((2.0 * PI).sqrt() * r);
            r * r * phi(jf) * phi(kf) * 4.0 * PI * r * r
        }),
        ProblemKind::VarCoeffX => Box::new(move |x: f64| {
            let y = (1.0 + x).log2();
            let phi = |m: f64| (m * PI * y).sin() * (2.0 / (LN_2 * (1.0 + x))).sqrt();
            x * phi(jf) * phi(kf)
        }),
    };
    integrate(f, 0.0, 1.0, 1e-14, 0.0, 4000).value
}

/// Closed form of the variable-coefficient coupling:
/// `I(|k-j|) - I(k+j) - δ_jk` with `I(m) = ln2 (2(-1)^m - 1)/(ln²2 + m²π²)`.
pub fn varcoeff_coupling_exact(j: usize, k: usize) -> f64 {
    let i = |m: usize| {
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        LN_2 * (2.0 * sign - 1.0) / (LN_2 * LN_2 + (m as f64 * PI).powi(2))
    };
    i(j.abs_diff(k)) - i(j + k) - if j == k { 1.0 } else { 0.0 }
}

/// Smooth test control for order studies.
#[derive(Debug, Clone, Copy)]
pub struct SineControl {
    pub amplitude: f64,
    pub frequency: f64,
}

impl Control for SineControl {
    fn value(&self, t: f64) -> f64 {
        self.amplitude * (self.frequency * t).sin()
    }
}

/// Ratio `e(h)/e(h/2)` of terminal errors of the splitting scheme against a
/// run at `h/16`; close to 4 for a second-order method.
pub fn strang_order_ratio(problem: &SpectralProblem, n: usize, h: f64) -> crate::Result<f64> {
    let system = GalerkinSystem::new(problem, n, 0.0, None)?;
    let u0: Vec<f64> = (1..=n).map(|k| 1.0 / (k * k) as f64).collect();
    let control = SineControl {
        amplitude: 2.0,
        frequency: 7.0,
    };
    let run = |dt: f64| -> crate::Result<Vec<f64>> {
        let cfg = SimConfig {
            n_sim: n,
            dt_max: dt,
            tol_step: 1e6,
            ..SimConfig::default()
        };
        Ok(system
            .integrate(&u0, &control, (0.0, 0.5), &cfg)?
            .final_state()
            .to_vec())
    };
    let reference = run(h / 16.0)?;
    let err = |x: Vec<f64>| norm(&x.iter().zip(&reference).map(|(a, b)| a - b).collect::<Vec<_>>());
    Ok(err(run(h)?) / err(run(h / 2.0)?))
}

/// Maximum difference between the Duhamel terminal state and the splitting
/// scheme on the linearized system, for a synthesized control.
pub fn duhamel_vs_stepper(problem: &SpectralProblem, j: usize, dt_max: f64) -> crate::Result<f64> {
    let n_ctrl = 6;
    let n_sim = 12;
    let horizon = 0.5;
    let mut y0 = vec![0.0; n_ctrl];
    for (i, y) in y0.iter_mut().enumerate() {
        *y = 1e-3 * (-(i as f64)).exp() * if i % 2 == 0 { 1.0 } else { -1.0 };
    }
    let cs = solve_min_norm(&build_moment_problem(problem, j, &y0, horizon, n_ctrl)?)?;
    let mut full = y0.clone();
    full.resize(n_sim, 0.0);
    let exact = simulate_linear_duhamel(problem, j, &full, &cs)?;
    let system = GalerkinSystem::new(problem, n_sim, problem.eigenvalue(j), Some(j))?;
    let cfg = SimConfig {
        n_sim,
        dt_max,
        ..SimConfig::default()
    };
    let traj = system.integrate_linear(&full, &cs, (0.0, horizon), &cfg)?;
    Ok(traj
        .final_state()
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

fn check_couplings(p: &SpectralProblem, out: &mut Vec<Check>) {
    let mut worst = 0.0f64;
    for j in 1..=10 {
        for k in 1..=10 {
            let lib = match p.b_entry(j, k) {
                Ok(v) => v,
                Err(e) => {
                    out.push(Check::new("coupling-entries", Some(p), false, e.to_string()));
                    return;
                }
            };
            let reference = if p.kind == ProblemKind::VarCoeffX {
                varcoeff_coupling_exact(j, k)
            } else {
                coupling_by_quadrature(p, j, k)
            };
            worst = worst.max((lib - reference).abs());
        }
    }
    out.push(Check::new(
        "coupling-entries",
        Some(p),
        worst <= 1e-10,
        format!("max |Δ| = {worst:.3e} (tol 1e-10)"),
    ));
}

fn check_gaps(p: &SpectralProblem, out: &mut Vec<Check>) {
    let g = verify_gap(p, 100);
    out.push(Check::new(
        "gap",
        Some(p),
        g >= p.gap_alpha - 1e-12,
        format!("min √λ_(k+1)-√λ_k = {g:.12} vs α = {:.12}", p.gap_alpha),
    ));
    let g = verify_gap_relative(p, 100);
    out.push(Check::new(
        "gap-relative",
        Some(p),
        g >= p.gap_alpha - 1e-12,
        format!("min gap above λ_1 = {g:.12} vs α = {:.12}", p.gap_alpha),
    ));
}

fn check_diagonal(p: &SpectralProblem, out: &mut Vec<Check>) {
    let bad: Vec<usize> = (1..=40)
        .filter(|&j| p.b_entry(j, j).map_or(true, |v| v == 0.0))
        .collect();
    out.push(Check::new(
        "diagonal-coupling",
        Some(p),
        bad.is_empty(),
        format!("zero or failed diagonal entries: {bad:?}"),
    ));
}

fn check_gram(p: &SpectralProblem, out: &mut Vec<Check>) {
    let mut ok = true;
    let mut worst_asym = 0.0f64;
    for t in [0.05, 0.1, 0.25, 0.5, 1.0] {
        for n in 1..=N_CTRL_CAP {
            let mp = match build_moment_problem(p, 1, &vec![0.0; n], t, n) {
                Ok(m) => m,
                Err(_) => {
                    ok = false;
                    continue;
                }
            };
            let g = gram_matrix(&mp.frequencies, t);
            worst_asym = worst_asym.max((&g - g.transpose()).amax());
            ok &= nalgebra::Cholesky::new(g).is_some();
        }
    }
    out.push(Check::new(
        "gram-positive-definite",
        Some(p),
        ok && worst_asym == 0.0,
        format!("N ≤ {N_CTRL_CAP}, T ∈ [0.05, 1], asymmetry {worst_asym:e}"),
    ));
}

fn check_synthesis(p: &SpectralProblem, out: &mut Vec<Check>) {
    let n = 8;
    let y0: Vec<f64> = (0..n).map(|i| 1e-2 * ((i as f64) * 1.3).cos()).collect();
    let result = build_moment_problem(p, 1, &y0, 0.5, n).and_then(|mp| {
        let cs = solve_min_norm(&mp)?;
        let y_t = simulate_linear_duhamel(p, 1, &y0, &cs)?;
        let gram = mp.gram();
        let dual = cs.duality_value(gram.shifted_targets.as_slice());
        Ok((
            norm(&y_t),
            (dual - cs.q_norm_sq).abs() / cs.q_norm_sq.max(f64::MIN_POSITIVE),
            cs.max_residual,
        ))
    });
    match result {
        Ok((terminal, identity, res)) => out.push(Check::new(
            "moment-synthesis",
            Some(p),
            terminal <= 1e-7 * norm(&y0) && identity <= 1e-10 && res <= 1e-8,
            format!(
                "‖y(T)‖/‖y0‖ = {:.2e}, min-norm identity {identity:.2e}, residual {res:.2e}",
                terminal / norm(&y0)
            ),
        )),
        Err(e) => out.push(Check::new("moment-synthesis", Some(p), false, e.to_string())),
    }
}

fn check_cost(p: &SpectralProblem, out: &mut Vec<Check>) {
    let result = (|| -> crate::Result<(bool, f64)> {
        let (model, _) = resolve_cost_model(p, 1, Param::Auto, Param::Value(1.0), 1.0)?;
        let mut ok = true;
        let mut min_slack = f64::INFINITY;
        for t in [0.05, 0.1, 0.2, 0.5, 1.0] {
            let mp = build_moment_problem(p, 1, &[0.0; 10], t, 10)?;
            let slack = model.nu / t - cost_of(&mp)?.ln();
            min_slack = min_slack.min(slack);
            ok &= slack >= 0.0;
        }
        Ok((ok, min_slack))
    })();
    match result {
        Ok((ok, s)) => out.push(Check::new(
            "cost-bound",
            Some(p),
            ok,
            format!("min ν/T - ln N(T) = {s:.3}"),
        )),
        Err(e) => out.push(Check::new("cost-bound", Some(p), false, e.to_string())),
    }
}

fn check_kt(p: &SpectralProblem, out: &mut Vec<Check>) {
    let result = (|| -> crate::Result<(bool, f64)> {
        let (model, _) = resolve_cost_model(p, 1, Param::Auto, Param::Value(1.0), 1.0)?;
        let sigma = frame_sigma(p, p.eigenvalue(1));
        let c = SteeringConstants::new(&model, p.b_norm, sigma, 1.0)?;
        let mut worst = f64::INFINITY;
        for i in 0..100 {
            let tau = c.t1 * 10f64.powf(-3.0 + 3.0 * i as f64 / 99.0);
            worst = worst.min(c.gamma0 / tau - log_kt(tau, model.nu / tau, p.b_norm, sigma));
        }
        Ok((worst >= 0.0, worst))
    })();
    match result {
        Ok((ok, s)) => out.push(Check::new(
            "k-envelope",
            Some(p),
            ok,
            format!("min Γ0/τ - ln K(τ) = {s:.3}"),
        )),
        Err(e) => out.push(Check::new("k-envelope", Some(p), false, e.to_string())),
    }
}

fn check_free_decay(p: &SpectralProblem, out: &mut Vec<Check>) {
    let n = 12;
    let u0: Vec<f64> = (1..=n).map(|k| 1.0 / k as f64).collect();
    let cfg = SimConfig {
        n_sim: n,
        ..SimConfig::default()
    };
    let result = GalerkinSystem::new(p, n, 0.0, None).and_then(|s| s.integrate(&u0, &ZeroControl, (0.0, 0.3), &cfg));
    match result {
        Ok(traj) => {
            let worst = traj
                .final_state()
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let exact = u0[i] * (-p.eigenvalue(i + 1) * 0.3).exp();
                    (x - exact).abs() / exact.abs().max(f64::MIN_POSITIVE)
                })
                .fold(0.0, f64::max);
            out.push(Check::new(
                "free-decay",
                Some(p),
                worst <= 1e-12,
                format!("max relative error {worst:.2e}"),
            ));
        }
        Err(e) => out.push(Check::new("free-decay", Some(p), false, e.to_string())),
    }
}

fn check_duhamel(p: &SpectralProblem, out: &mut Vec<Check>) {
    match duhamel_vs_stepper(p, 1, 1e-3) {
        Ok(d) => out.push(Check::new(
            "duhamel-vs-stepper",
            Some(p),
            d <= 1e-6,
            format!("max |Δ| = {d:.2e} at dt = 1e-3"),
        )),
        Err(e) => out.push(Check::new("duhamel-vs-stepper", Some(p), false, e.to_string())),
    }
}

fn check_identities(out: &mut Vec<Check>) {
    let worst = (1..=60)
        .map(|n| {
            let (l, r) = weighted_sum_identity(n);
            (l - r).abs() / r.abs()
        })
        .fold(0.0, f64::max);
    out.push(Check::new(
        "weighted-sum-identity",
        None,
        worst <= 1e-12,
        format!("max relative error {worst:.2e}, n ≤ 60"),
    ));
    let ok = (1u32..=60).all(|n| {
        let lhs: u128 = (1..=n).map(|j| (1u128 << (n - j)) * (j as u128).pow(2)).sum();
        let n = n as u128;
        lhs + n * n + 4 * n + 6 == 6 * (1u128 << n)
    });
    out.push(Check::new(
        "telescoping-identity",
        None,
        ok,
        "Σ 2^(n-j) j² = 6·2^n - n² - 4n - 6 for n ≤ 60".into(),
    ));
}

fn check_gm(out: &mut Vec<Check>) {
    let p = SpectralProblem::from_kind(ProblemKind::DirichletX2);
    let result = (|| -> crate::Result<(bool, String)> {
        let s = compute_suffcond(&p, 1, 1.0)?;
        let horizon = 1.0;
        let start = match compute_gm(s.m, horizon, &p, 1, 2) {
            Err(crate::Error::TruncationTooSmall { required, .. }) => required,
            Ok(_) => 2,
            Err(e) => return Err(e),
        };
        let totals: Vec<f64> = (start..start + 20)
            .map(|t| compute_gm(s.m, horizon, &p, 1, t).map(|g| g.log_total()))
            .collect::<crate::Result<_>>()?;
        let ok = totals.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs());
        Ok((
            ok,
            format!(
                "ln(G_M + tail) from {:.6} to {:.6}, trunc {start}..{}",
                totals[0],
                totals[19],
                start + 19
            ),
        ))
    })();
    match result {
        Ok((ok, d)) => out.push(Check::new("gm-tail-monotone", Some(&p), ok, d)),
        Err(e) => out.push(Check::new("gm-tail-monotone", Some(&p), false, e.to_string())),
    }
}

fn check_order(out: &mut Vec<Check>) {
    let p = SpectralProblem::from_kind(ProblemKind::DirichletX2);
    match strang_order_ratio(&p, 8, 1e-2) {
        Ok(r) => out.push(Check::new(
            "splitting-order",
            Some(&p),
            (3.5..=4.5).contains(&r),
            format!("error ratio {r:.4} (second order: 4)"),
        )),
        Err(e) => out.push(Check::new("splitting-order", Some(&p), false, e.to_string())),
    }
}

/// Run every check, restricted to one problem when `only` is given.
pub fn run_checks(only: Option<&SpectralProblem>) -> Vec<Check> {
    let problems = match only {
        Some(p) => vec![p.clone()],
        None => gallery(),
    };
    let mut out = Vec::new();
    for p in &problems {
        check_couplings(p, &mut out);
        check_gaps(p, &mut out);
        check_diagonal(p, &mut out);
        check_gram(p, &mut out);
        check_synthesis(p, &mut out);
        check_cost(p, &mut out);
        check_kt(p, &mut out);
        check_free_decay(p, &mut out);
        check_duhamel(p, &mut out);
    }
    if only.is_none_or(|p| p.kind == ProblemKind::DirichletX2) {
        check_gm(&mut out);
        check_order(&mut out);
    }
    check_identities(&mut out);
    out
}
