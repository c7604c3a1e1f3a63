//! Iterative steering onto eigensolutions.
//!
//! Work happens in the frame `z(t) = e^{λ_j t} u(t)`, where the target `ψ_j`
//! becomes the fixed point `φ_j` and the deviation `v = z - φ_j` obeys
//! `v' + (A - λ_j) v + p B (v + φ_j) = 0`. The control is unchanged by the
//! change of frame. Window `n` has length `T_n = T1/n²`; on it the linear
//! part is null-controlled by a minimum-norm moment solution computed from
//! `v_{n-1}`, and the nonlinear system is integrated to obtain `v_n`.

use serde::Serialize;
use thiserror::Error;

use crate::constants::{log_control_norm_bound, log_kt, CostModel, SteeringConstants, SuffCondConstants};
use crate::control::PiecewiseControl;
use crate::error::Error;
use crate::moment::{
    build_moment_problem, control_l2_norm, cost_of, solve_min_norm_with, ControlSignal, DEFAULT_TOL_RES, N_CTRL_CAP,
};
use crate::numerics::{exp_or_saturate, log_norm_from_logs, norm};
use crate::simulator::{
    check_apriori_v, check_apriori_w, frame_sigma, simulate_linear_duhamel, AprioriCheck, GalerkinSystem, SimConfig,
};
use crate::spectral::SpectralProblem;

pub const DEFAULT_TOL_FINAL: f64 = 1e-10;
pub const DEFAULT_N_MAX: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteeringConfig {
    pub n_ctrl: usize,
    pub tol_final: f64,
    pub n_max: usize,
    /// Abort on hypothesis violations instead of recording them.
    pub strict: bool,
    pub cost_model: CostModel,
    pub sim: SimConfig,
    pub tol_res: f64,
    /// Replaces the theoretical `r1` of the semi-global strategy.
    pub r1_override: Option<f64>,
    /// Sufficient-condition constants behind an automatic cost model.
    pub suffcond: Option<SuffCondConstants>,
}

impl SteeringConfig {
    pub fn new(cost_model: CostModel) -> Self {
        SteeringConfig {
            n_ctrl: crate::moment::DEFAULT_N_CTRL,
            tol_final: DEFAULT_TOL_FINAL,
            n_max: DEFAULT_N_MAX,
            strict: false,
            cost_model,
            sim: SimConfig::default(),
            tol_res: DEFAULT_TOL_RES,
            r1_override: None,
            suffcond: None,
        }
    }

    pub fn n_sim(&self) -> usize {
        self.sim.n_sim
    }
}

/// Diagnostics of one window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowRecord {
    pub n: usize,
    pub t_n: f64,
    pub tau_start: f64,
    pub tau_end: f64,
    pub v_prev_norm: f64,
    pub v_norm: f64,
    pub p_norm: f64,
    pub q_norm: f64,
    /// Empirical cost `N(T_n)` of the truncated moment problem.
    pub cost_emp: f64,
    /// `K(T_n)` evaluated with the empirical cost.
    pub k_emp: f64,
    /// `‖v_n‖ / ‖v_{n-1}‖²`.
    pub contraction_ratio: f64,
    pub contraction_holds: bool,
    /// `N(T_n) ‖v_{n-1}‖ ≤ 1`.
    pub hypothesis_holds: bool,
    /// `ln(e^{ν/T_n} ‖v_{n-1}‖)`, the theoretical control budget of the window.
    pub log_p_bound_theory: f64,
    pub p_within_theory: bool,
    /// `ln` of `Π_{m≤n} K(T_m)^{2^{n-m}} ‖v_0‖^{2^n}` with empirical `K`.
    pub log_cascade_bound: f64,
    pub apriori_v: AprioriCheck,
    pub apriori_w: AprioriCheck,
    /// `‖v_n - y_n‖` with `y_n` the linear terminal state.
    pub w_norm: f64,
    /// Linear terminal state on the controlled modes.
    pub linear_residual: f64,
    /// Linear terminal state on the uncontrolled modes.
    pub spillover: f64,
    pub regularized: bool,
    pub gram_condition: f64,
    pub moment_residual: f64,
    pub steps: usize,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    AlreadyOnTarget,
    Converged,
    MaxWindows,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteeringReport {
    pub version: String,
    pub problem: String,
    pub j: usize,
    pub horizon: f64,
    /// Absolute start time of the first window.
    pub t_start: f64,
    pub constants: SteeringConstants,
    pub suffcond: Option<SuffCondConstants>,
    pub config: SteeringConfig,
    pub v0_norm: f64,
    /// The initial deviation is at least `R_T`.
    pub outside_theory: bool,
    pub windows: Vec<WindowRecord>,
    pub total_p_sq: f64,
    pub final_v_norm: f64,
    pub windows_used: usize,
    pub stop: StopReason,
    /// Absolute end of the last window.
    pub tau_end: f64,
    /// Absolute time `t_start + Tf` at which the terminal error is measured.
    pub final_time: f64,
    /// `‖u(final_time) - ψ_j(final_time)‖`.
    pub final_error: f64,
    /// `‖z(final_time) - φ_j‖`.
    pub final_error_z: f64,
    pub flags: Vec<String>,
}

impl SteeringReport {
    pub fn converged(&self) -> bool {
        self.stop != StopReason::MaxWindows
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteeringOutcome {
    pub control: PiecewiseControl<ControlSignal>,
    pub report: SteeringReport,
    /// Deviation `v` in the `z` frame at `report.tau_end`.
    pub final_deviation: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum SteerFailure {
    #[error("deviation grew on two consecutive windows")]
    Divergence(Box<SteeringReport>),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Failed(#[from] Error),
}

impl From<serde_json::Error> for SteerFailure {
    fn from(e: serde_json::Error) -> Self {
        SteerFailure::Failed(Error::InvalidArgument(e.to_string()))
    }
}

pub type SteerResult<T> = std::result::Result<T, SteerFailure>;

fn pad(v: &[f64], n: usize) -> SteerResult<Vec<f64>> {
    if v.len() > n {
        return Err(Error::InvalidArgument(format!("datum has {} modes but n_sim = {n}", v.len())).into());
    }
    let mut out = v.to_vec();
    out.resize(n, 0.0);
    Ok(out)
}

fn validate(cfg: &SteeringConfig, j: usize) -> SteerResult<()> {
    if cfg.n_ctrl == 0 || cfg.n_ctrl > N_CTRL_CAP {
        return Err(Error::ModeCapExceeded {
            requested: cfg.n_ctrl,
            cap: N_CTRL_CAP,
        }
        .into());
    }
    if cfg.n_sim() < cfg.n_ctrl {
        return Err(Error::InvalidArgument(format!("n_sim = {} < n_ctrl = {}", cfg.n_sim(), cfg.n_ctrl)).into());
    }
    if cfg.n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()).into());
    }
    if j == 0 || j > cfg.n_ctrl {
        return Err(Error::InvalidArgument(format!("target index j = {j} must lie in 1..={}", cfg.n_ctrl)).into());
    }
    Ok(())
}

/// Free evolution of a deviation in the `z` frame: `v_k ← e^{-(λ_k-λ_j) t} v_k`.
pub fn free_deviation(problem: &SpectralProblem, j: usize, v: &[f64], duration: f64) -> Vec<f64> {
    let lj = problem.eigenvalue(j);
    v.iter()
        .enumerate()
        .map(|(i, x)| x * (-(problem.eigenvalue(i + 1) - lj) * duration).exp())
        .collect()
}

/// Steer `u0` onto `ψ_j` within horizon `T`.
pub fn steer_local(
    problem: &SpectralProblem,
    j: usize,
    u0: &[f64],
    horizon: f64,
    cfg: &SteeringConfig,
) -> SteerResult<SteeringOutcome> {
    validate(cfg, j)?;
    let mut v0 = pad(u0, cfg.n_sim())?;
    v0[j - 1] -= 1.0;
    run_local(problem, j, v0, 0.0, horizon, cfg)
}

/// Windowed iteration from the deviation `v0` (length `n_sim`, `z` frame)
/// starting at absolute time `t_start`.
pub fn run_local(
    problem: &SpectralProblem,
    j: usize,
    v0: Vec<f64>,
    t_start: f64,
    horizon: f64,
    cfg: &SteeringConfig,
) -> SteerResult<SteeringOutcome> {
    validate(cfg, j)?;
    let n_sim = cfg.n_sim();
    let n_ctrl = cfg.n_ctrl;
    let frame = problem.eigenvalue(j);
    let sigma = frame_sigma(problem, frame);
    let consts = SteeringConstants::new(&cfg.cost_model, problem.b_norm, sigma, horizon)?;
    let sched = consts.schedule();
    let v0_norm = norm(&v0);
    let outside_theory = v0_norm > 0.0 && v0_norm.ln() >= consts.log_rt;
    let mut flags = Vec::new();
    if outside_theory {
        if cfg.strict {
            return Err(SteerFailure::Precondition(format!(
                "‖u0 - φ_j‖ = {v0_norm:e} is not below R_T = exp({:.6e})",
                consts.log_rt
            )));
        }
        flags.push("outside-theory".to_string());
    }
    let system = GalerkinSystem::new(problem, n_sim, frame, Some(j))?;

    let mut report = SteeringReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        problem: problem.name().to_string(),
        j,
        horizon,
        t_start,
        constants: consts,
        suffcond: cfg.suffcond,
        config: cfg.clone(),
        v0_norm,
        outside_theory,
        windows: Vec::new(),
        total_p_sq: 0.0,
        final_v_norm: v0_norm,
        windows_used: 0,
        stop: StopReason::AlreadyOnTarget,
        tau_end: t_start,
        final_time: t_start + consts.tf,
        final_error: 0.0,
        final_error_z: 0.0,
        flags,
    };
    let mut pieces = Vec::new();
    let mut v = v0;
    let mut growth_streak = 0;
    let mut log_cascade = if v0_norm > 0.0 { v0_norm.ln() } else { f64::NEG_INFINITY };

    if v0_norm > cfg.tol_final {
        for n in 1..=cfg.n_max {
            let t_n = sched.window(n);
            let a = t_start + sched.tau(n - 1);
            let b = t_start + sched.tau(n);
            let v_prev_norm = norm(&v);
            let mp = build_moment_problem(problem, j, &v[..n_ctrl], t_n, n_ctrl)?;
            let cs = solve_min_norm_with(&mp, cfg.tol_res)?.with_offset(a);
            let cost_emp = cost_of(&mp)?;
            let p_norm = control_l2_norm(&cs);
            let hypothesis_holds = cost_emp * v_prev_norm <= 1.0;
            if cfg.strict && !hypothesis_holds {
                return Err(SteerFailure::Precondition(format!(
                    "window {n}: N(T_n)·‖v_(n-1)‖ = {:e} exceeds 1",
                    cost_emp * v_prev_norm
                )));
            }
            let traj = system.integrate(&v, &cs, (a, b), &cfg.sim)?;
            let v_new = traj.final_state().to_vec();
            let v_norm = norm(&v_new);
            let y = simulate_linear_duhamel(problem, j, &v, &cs)?;
            let w: Vec<f64> = v_new.iter().zip(&y).map(|(a, b)| a - b).collect();
            let w_norm = norm(&w);
            let log_k = log_kt(t_n, cost_emp.ln(), problem.b_norm, sigma);
            let k_emp = exp_or_saturate(log_k);
            let contraction_holds = v_norm <= k_emp * v_prev_norm * v_prev_norm;
            let apriori_v = check_apriori_v(problem, &traj, &cs, v_prev_norm, cost_emp);
            let apriori_w = check_apriori_w(problem, w_norm, v_prev_norm, t_n, cost_emp, sigma);
            let log_p_bound_theory = consts.nu / t_n + v_prev_norm.ln();
            let p_within_theory = p_norm == 0.0 || p_norm.ln() <= log_p_bound_theory;
            log_cascade = log_k + 2.0 * log_cascade;

            let mut wflags = Vec::new();
            for (bad, name) in [
                (!hypothesis_holds, "hypothesis-violated"),
                (!contraction_holds, "contraction-violated"),
                (!apriori_v.holds, "apriori-v-violated"),
                (!apriori_w.holds, "apriori-w-violated"),
                (!apriori_w.precondition, "apriori-w-precondition"),
                (!p_within_theory, "p-exceeds-theory"),
                (cs.regularized, "regularized"),
            ] {
                if bad {
                    wflags.push(name.to_string());
                }
            }
            report.windows.push(WindowRecord {
                n,
                t_n,
                tau_start: a,
                tau_end: b,
                v_prev_norm,
                v_norm,
                p_norm,
                q_norm: cs.q_norm(),
                cost_emp,
                k_emp,
                contraction_ratio: v_norm / (v_prev_norm * v_prev_norm),
                contraction_holds,
                hypothesis_holds,
                log_p_bound_theory,
                p_within_theory,
                log_cascade_bound: log_cascade,
                apriori_v,
                apriori_w,
                w_norm,
                linear_residual: norm(&y[..n_ctrl]),
                spillover: norm(&y[n_ctrl..]),
                regularized: cs.regularized,
                gram_condition: cs.condition,
                moment_residual: cs.max_residual,
                steps: traj.steps,
                flags: wflags,
            });
            report.total_p_sq += p_norm * p_norm;
            report.windows_used = n;
            report.tau_end = b;
            pieces.push(cs);
            v = v_new;
            report.final_v_norm = v_norm;

            growth_streak = if v_norm > v_prev_norm { growth_streak + 1 } else { 0 };
            if growth_streak >= 2 {
                report.stop = StopReason::MaxWindows;
                return Err(SteerFailure::Divergence(Box::new(report)));
            }
            if v_norm <= cfg.tol_final {
                report.stop = StopReason::Converged;
                break;
            }
            report.stop = StopReason::MaxWindows;
        }
    }

    let tail = free_deviation(problem, j, &v, report.final_time - report.tau_end);
    report.final_error_z = norm(&tail);
    report.final_error = (-frame * report.final_time).exp() * report.final_error_z;
    Ok(SteeringOutcome {
        control: PiecewiseControl::new(pieces),
        report,
        final_deviation: v,
    })
}

/// Doubly exponential envelope check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeCheck {
    pub holds: bool,
    /// `ln(bound_n) - ln‖v_n‖` for every window.
    pub slacks: Vec<f64>,
    /// `e^{6Γ₀/T1}‖v0‖ < 1`; otherwise the envelope grows and is vacuous.
    pub contracting_base: bool,
}

/// `‖v_n‖ ≤ (e^{6Γ₀/T1} ‖v0‖)^{2^n}` at every recorded window.
pub fn verify_superexponential(report: &SteeringReport, gamma0: f64, t1: f64) -> EnvelopeCheck {
    let log_base = 6.0 * gamma0 / t1 + report.v0_norm.ln();
    let slacks: Vec<f64> = report
        .windows
        .iter()
        .map(|w| {
            let log_bound = 2f64.powi(w.n as i32) * log_base;
            if w.v_norm == 0.0 {
                f64::INFINITY
            } else {
                log_bound - w.v_norm.ln()
            }
        })
        .collect();
    EnvelopeCheck {
        holds: slacks.iter().all(|s| *s >= 0.0),
        slacks,
        contracting_base: log_base < 0.0,
    }
}

/// Slope of `ln ln(1/‖v_n‖)` against `n`; `ln 2` for pure quadratic
/// contraction. Needs at least three windows with `0 < ‖v_n‖ < 1`.
pub fn doubling_slope(report: &SteeringReport) -> Option<f64> {
    let pts: Vec<(f64, f64)> = report
        .windows
        .iter()
        .filter(|w| w.v_norm > 0.0 && w.v_norm < 1.0)
        .map(|w| (w.n as f64, (-w.v_norm.ln()).ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Total control energy against the theoretical budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BudgetCheck {
    pub holds: bool,
    pub total_p_sq: f64,
    pub log_total: f64,
    /// `2 ln` of the control-norm bound.
    pub log_bound: f64,
    pub slack: f64,
}

/// `Σ ‖p_n‖² ≤ bound(Γ₀, Tf)²`, compared in log space.
pub fn control_budget_check(report: &SteeringReport, gamma0: f64, tf: f64) -> BudgetCheck {
    let log_total = if report.total_p_sq > 0.0 {
        report.total_p_sq.ln()
    } else {
        f64::NEG_INFINITY
    };
    let log_bound = 2.0 * log_control_norm_bound(gamma0, tf);
    BudgetCheck {
        holds: log_total <= log_bound,
        total_p_sq: report.total_p_sq,
        log_total,
        log_bound,
        slack: log_bound - log_total,
    }
}

/// Semi-global run: free decay followed by a unit-length local phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemiglobalReport {
    pub radius: f64,
    pub log_r1: f64,
    pub r1_from_theory: bool,
    /// Length of the uncontrolled phase.
    pub t_r: f64,
    pub log_post_decay_norm: f64,
    /// `ln(√2 r1)`.
    pub log_decay_threshold: f64,
    pub local: SteeringReport,
    /// `t_R + 1`.
    pub total_time: f64,
    /// `‖z(T_R) - φ_1‖`.
    pub terminal_error_z: f64,
    /// `‖u(T_R) - ψ_1(T_R)‖`.
    pub terminal_error: f64,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemiglobalOutcome {
    pub control: PiecewiseControl<ControlSignal>,
    pub report: SemiglobalReport,
}

/// `ln r1` with `r1 = R_{T=1}/√2`, or the configured override.
pub fn log_r1(problem: &SpectralProblem, cfg: &SteeringConfig) -> SteerResult<(f64, bool)> {
    if let Some(r) = cfg.r1_override {
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!("r1 override must be positive, got {r}")).into());
        }
        return Ok((r.ln(), false));
    }
    let sigma = frame_sigma(problem, problem.eigenvalue(1));
    let c = SteeringConstants::new(&cfg.cost_model, problem.b_norm, sigma, 1.0)?;
    Ok((c.log_rt - 0.5 * 2f64.ln(), true))
}

/// Free-decay duration `ln(R/r1)/(λ_2 - λ_1)`, zero when `R ≤ r1`.
pub fn free_decay_time(problem: &SpectralProblem, radius: f64, log_r1: f64) -> f64 {
    let gap = problem.eigenvalue(2) - problem.eigenvalue(1);
    let log_ratio = radius.ln() - log_r1;
    if log_ratio <= 0.0 {
        0.0
    } else {
        log_ratio / gap
    }
}

/// Steer any datum with `|⟨u0,φ_1⟩ - 1| < r1` and orthogonal part of norm at
/// most `R` onto `ψ_1` in time `t_R + 1`.
pub fn steer_semiglobal(
    problem: &SpectralProblem,
    u0: &[f64],
    radius: f64,
    cfg: &SteeringConfig,
) -> SteerResult<SemiglobalOutcome> {
    validate(cfg, 1)?;
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("R must be positive, got {radius}")).into());
    }
    let mut flags = Vec::new();
    if problem.sigma > 0.0 || problem.eigenvalue(1) < 0.0 {
        if cfg.strict {
            return Err(SteerFailure::Precondition(
                "semi-global steering needs σ = 0 and λ_1 ≥ 0".into(),
            ));
        }
        flags.push("sigma-positive".to_string());
    }
    let n_sim = cfg.n_sim();
    let mut v0 = pad(u0, n_sim)?;
    v0[0] -= 1.0;
    let (log_r1, from_theory) = log_r1(problem, cfg)?;
    let along = v0[0].abs();
    if along > 0.0 && along.ln() >= log_r1 {
        return Err(SteerFailure::Precondition(format!(
            "|⟨u0,φ_1⟩ - 1| = {along:e} is not below r1 = exp({log_r1:.6e})"
        )));
    }
    let orth = norm(&v0[1..]);
    if orth > radius {
        return Err(SteerFailure::Precondition(format!(
            "orthogonal part {orth:e} exceeds R = {radius}"
        )));
    }
    let t_r = free_decay_time(problem, radius, log_r1);
    let l1 = problem.eigenvalue(1);
    let log_post = log_norm_from_logs(v0.iter().enumerate().map(|(i, x)| {
        if *x == 0.0 {
            f64::NEG_INFINITY
        } else {
            x.abs().ln() - (problem.eigenvalue(i + 1) - l1) * t_r
        }
    }));
    let log_threshold = log_r1 + 0.5 * 2f64.ln();
    if !(log_post < log_threshold) {
        return Err(Error::DecayPhase {
            log_norm: log_post,
            log_threshold,
        }
        .into());
    }
    let v_tr = free_deviation(problem, 1, &v0, t_r);
    let local = run_local(problem, 1, v_tr, t_r, 1.0, cfg)?;
    let total_time = t_r + 1.0;
    let tail = free_deviation(problem, 1, &local.final_deviation, total_time - local.report.tau_end);
    let terminal_error_z = norm(&tail);
    if !from_theory {
        flags.push("r1-override".to_string());
    }
    let report = SemiglobalReport {
        radius,
        log_r1,
        r1_from_theory: from_theory,
        t_r,
        log_post_decay_norm: log_post,
        log_decay_threshold: log_threshold,
        total_time,
        terminal_error_z,
        terminal_error: (-l1 * total_time).exp() * terminal_error_z,
        local: local.report,
        flags,
    };
    Ok(SemiglobalOutcome {
        control: local.control,
        report,
    })
}

/// Cone steering onto `⟨u0,φ_1⟩ ψ_1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionReport {
    /// `γ = ⟨u0, φ_1⟩`.
    pub gamma: f64,
    pub orthogonal_norm: f64,
    pub radius: f64,
    pub semiglobal: Option<SemiglobalReport>,
    pub total_time: f64,
    /// `‖z(T_R) - γ φ_1‖` from integrating the unscaled datum.
    pub terminal_error_z: f64,
    /// `‖u(T_R) - γ ψ_1(T_R)‖`.
    pub terminal_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionOutcome {
    pub control: PiecewiseControl<ControlSignal>,
    pub report: ProjectionReport,
}

/// Steer `u0` onto `⟨u0,φ_1⟩ψ_1` when `‖u0 - ⟨u0,φ_1⟩φ_1‖ ≤ R |⟨u0,φ_1⟩|`.
///
/// The control is synthesized for `u0/γ` and then checked by integrating the
/// original datum under it.
pub fn steer_to_projection(
    problem: &SpectralProblem,
    u0: &[f64],
    radius: f64,
    cfg: &SteeringConfig,
) -> SteerResult<ProjectionOutcome> {
    validate(cfg, 1)?;
    let n_sim = cfg.n_sim();
    let u = pad(u0, n_sim)?;
    let gamma = u[0];
    let orth = norm(&u[1..]);
    if orth > radius * gamma.abs() {
        return Err(SteerFailure::Precondition(format!(
            "cone condition fails: ‖u0 - γφ_1‖ = {orth:e} > R|γ| = {:e}",
            radius * gamma.abs()
        )));
    }
    if gamma == 0.0 {
        let report = ProjectionReport {
            gamma,
            orthogonal_norm: orth,
            radius,
            semiglobal: None,
            total_time: 0.0,
            terminal_error_z: 0.0,
            terminal_error: 0.0,
        };
        return Ok(ProjectionOutcome {
            control: PiecewiseControl::default(),
            report,
        });
    }
    let scaled: Vec<f64> = u.iter().map(|x| x / gamma).collect();
    let sg = steer_semiglobal(problem, &scaled, radius, cfg)?;
    let total_time = sg.report.total_time;
    let l1 = problem.eigenvalue(1);
    let system = GalerkinSystem::new(problem, n_sim, l1, None)?;
    let traj = system.integrate(&u, &sg.control, (0.0, total_time), &cfg.sim)?;
    let mut diff = traj.final_state().to_vec();
    diff[0] -= gamma;
    let terminal_error_z = norm(&diff);
    let report = ProjectionReport {
        gamma,
        orthogonal_norm: orth,
        radius,
        total_time,
        terminal_error_z,
        terminal_error: (-l1 * total_time).exp() * terminal_error_z,
        semiglobal: Some(sg.report),
    };
    Ok(ProjectionOutcome {
        control: sg.control,
        report,
    })
}

/// Report the outcome's error against a target without rerunning anything.
pub fn deviation_norm_at(problem: &SpectralProblem, j: usize, v_end: &[f64], t_end: f64, t: f64) -> f64 {
    (-problem.eigenvalue(j) * t).exp() * norm(&free_deviation(problem, j, v_end, t - t_end))
}
