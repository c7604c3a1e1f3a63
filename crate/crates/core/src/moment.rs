//! Minimum-norm null controls for the linearized system
//! `y' + (A - λ_f) y + p(t) Bφ_j = 0`, where `λ_f` is the frame shift.
//!
//! Null-controllability on `[0, T]` reduces to the moment equations
//! `∫₀^T e^{μ_k s} p(s) ds = y0_k / ⟨Bφ_j,φ_k⟩` with `μ_k = λ_k - λ_f`.
//! Writing `p(s) = e^{-σ s} q(s)` with `σ = min_k μ_k` turns the exponents into
//! `ω_k = μ_k - σ ≥ 0`. The minimum-norm `q` lies in the span of
//! `e^{ω_k (s - T)}`, whose Gram matrix has entries in `(0, T]`; targets are
//! scaled by `e^{-ω_k T}` to match.
//!
//! Residuals are measured on that shifted scale:
//! `|(G̃c̃)_k - m̃_k| ≤ tol·(1 + |m̃_k|)`. Up to the factor `b_jk e^{-σT}` this is
//! the terminal state of mode `k`, which is the quantity the steering loop
//! needs small; the unscaled moment residual carries a factor `e^{ω_k T}` that
//! is not representable for the upper modes.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use serde::Serialize;

use crate::control::{Control, Windowed};
use crate::error::{Error, Result};
use crate::numerics::{decay_integral, dot2};
use crate::spectral::SpectralProblem;

pub const DEFAULT_N_CTRL: usize = 10;
/// Largest number of controlled modes accepted in binary64.
pub const N_CTRL_CAP: usize = 16;
/// Relative ridge added to the Gram diagonal when Cholesky fails.
pub const RIDGE_EPS: f64 = 1e-13;
pub const DEFAULT_TOL_RES: f64 = 1e-8;

/// Moment data for one window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentProblem {
    pub horizon: f64,
    pub j: usize,
    /// `λ_f`: the operator is `A - λ_f`.
    pub frame_shift: f64,
    /// `σ = min_k (λ_k - λ_f)`; the control is `p(s) = e^{-σ s} q(s)`.
    pub shift_lambda: f64,
    /// `ω_k = λ_k - λ_f - σ`, nondecreasing with `ω_1 = 0`.
    pub frequencies: Vec<f64>,
    /// `m_k = y0_k / ⟨Bφ_j,φ_k⟩`.
    pub targets: Vec<f64>,
    /// `⟨Bφ_j,φ_k⟩`.
    pub couplings: Vec<f64>,
}

/// Moment problem in the frame `A - λ_j`, the one used for steering to `ψ_j`.
pub fn build_moment_problem(
    problem: &SpectralProblem,
    j: usize,
    y0: &[f64],
    horizon: f64,
    n_ctrl: usize,
) -> Result<MomentProblem> {
    build_moment_problem_in_frame(problem, j, y0, horizon, n_ctrl, problem.eigenvalue(j))
}

/// Moment problem for `y' + (A - frame_shift) y + p Bφ_j = 0`.
pub fn build_moment_problem_in_frame(
    problem: &SpectralProblem,
    j: usize,
    y0: &[f64],
    horizon: f64,
    n_ctrl: usize,
    frame_shift: f64,
) -> Result<MomentProblem> {
    if n_ctrl > N_CTRL_CAP {
        return Err(Error::ModeCapExceeded {
            requested: n_ctrl,
            cap: N_CTRL_CAP,
        });
    }
    if n_ctrl == 0 || y0.len() != n_ctrl {
        return Err(Error::InvalidArgument(format!(
            "need {n_ctrl} > 0 coefficients, got {}",
            y0.len()
        )));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let mu: Vec<f64> = (1..=n_ctrl).map(|k| problem.eigenvalue(k) - frame_shift).collect();
    let shift = mu.iter().copied().fold(f64::INFINITY, f64::min);
    let mut couplings = Vec::with_capacity(n_ctrl);
    for k in 1..=n_ctrl {
        let b = problem.b_entry(j, k)?;
        if b == 0.0 {
            return Err(Error::DegenerateCoupling { j, k });
        }
        couplings.push(b);
    }
    Ok(MomentProblem {
        horizon,
        j,
        frame_shift,
        shift_lambda: shift,
        frequencies: mu.iter().map(|m| m - shift).collect(),
        targets: y0.iter().zip(&couplings).map(|(y, b)| y / b).collect(),
        couplings,
    })
}

/// Gram matrix of `e^{ω_k (s-T)}` on `[0, T]` and the matching targets.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSystem {
    pub matrix: DMatrix<f64>,
    pub shifted_targets: DVector<f64>,
    /// `λ_max / λ_min` (infinite if the computed spectrum is not positive).
    pub condition: f64,
}

/// `G̃` for frequencies `ω` on `[0, T]`.
pub fn gram_matrix(frequencies: &[f64], horizon: f64) -> DMatrix<f64> {
    let n = frequencies.len();
    let mut g = DMatrix::zeros(n, n);
    for k in 0..n {
        for l in k..n {
            let v = decay_integral(frequencies[k] + frequencies[l], horizon);
            g[(k, l)] = v;
            g[(l, k)] = v;
        }
    }
    g
}

fn condition_number(g: &DMatrix<f64>) -> f64 {
    let ev = SymmetricEigen::new(g.clone()).eigenvalues;
    let (lo, hi) = ev
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

impl MomentProblem {
    pub fn n_ctrl(&self) -> usize {
        self.frequencies.len()
    }

    pub fn gram(&self) -> GramSystem {
        let matrix = gram_matrix(&self.frequencies, self.horizon);
        let shifted_targets = DVector::from_iterator(
            self.n_ctrl(),
            self.frequencies
                .iter()
                .zip(&self.targets)
                .map(|(w, m)| (-w * self.horizon).exp() * m),
        );
        let condition = condition_number(&matrix);
        GramSystem {
            matrix,
            shifted_targets,
            condition,
        }
    }
}

/// Factor `G̃`, falling back to a single ridge-regularized attempt.
fn factor(g: &DMatrix<f64>) -> Option<(Cholesky<f64, Dyn>, bool)> {
    if let Some(c) = Cholesky::new(g.clone()) {
        return Some((c, false));
    }
    let n = g.nrows();
    let ridge = RIDGE_EPS * g.trace() / n as f64;
    let shifted = g + DMatrix::identity(n, n) * ridge;
    Cholesky::new(shifted).map(|c| (c, true))
}

/// `b - A x` evaluated with compensated dot products.
fn residual(a: &DMatrix<f64>, x: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    let xs = x.as_slice();
    DVector::from_iterator(
        b.len(),
        (0..b.len()).map(|k| {
            let row: Vec<f64> = a.row(k).iter().copied().collect();
            b[k] - dot2(&row, xs)
        }),
    )
}

/// `xᵀ A x` with compensated dot products.
fn quadratic_form(a: &DMatrix<f64>, x: &[f64]) -> f64 {
    let ax: Vec<f64> = (0..x.len())
        .map(|k| {
            let row: Vec<f64> = a.row(k).iter().copied().collect();
            dot2(&row, x)
        })
        .collect();
    dot2(x, &ax)
}

/// A window control `p(s) = e^{-σ s} Σ_k c̃_k e^{ω_k (s - T)}`, `s ∈ [0, T]`,
/// placed at absolute times `[window_offset, window_offset + T]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlSignal {
    pub horizon: f64,
    pub shift_lambda: f64,
    pub frame_shift: f64,
    pub frequencies: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub window_offset: f64,
    /// Set when the ridge fallback was used.
    pub regularized: bool,
    /// Largest scaled moment residual after refinement.
    pub max_residual: f64,
    /// `‖q‖² = c̃ᵀG̃c̃`.
    pub q_norm_sq: f64,
    /// Condition estimate of the Gram matrix.
    pub condition: f64,
}

impl ControlSignal {
    /// The zero control on `[offset, offset + T]`.
    pub fn zero(horizon: f64, window_offset: f64) -> Self {
        ControlSignal {
            horizon,
            shift_lambda: 0.0,
            frame_shift: 0.0,
            frequencies: vec![0.0],
            coefficients: vec![0.0],
            window_offset,
            regularized: false,
            max_residual: 0.0,
            q_norm_sq: 0.0,
            condition: 1.0,
        }
    }

    pub fn with_offset(mut self, window_offset: f64) -> Self {
        self.window_offset = window_offset;
        self
    }

    /// `q(s)` in window-local time.
    pub fn q_local(&self, s: f64) -> f64 {
        self.frequencies
            .iter()
            .zip(&self.coefficients)
            .map(|(w, c)| c * (w * (s - self.horizon)).exp())
            .sum()
    }

    /// `p(s)` in window-local time.
    pub fn p_local(&self, s: f64) -> f64 {
        (-self.shift_lambda * s).exp() * self.q_local(s)
    }

    pub fn q_norm(&self) -> f64 {
        self.q_norm_sq.max(0.0).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|c| *c == 0.0)
    }

    /// `c̃ᵀ m̃`, which equals `‖q‖²` for an exact minimum-norm solution.
    pub fn duality_value(&self, shifted_targets: &[f64]) -> f64 {
        dot2(&self.coefficients, shifted_targets)
    }
}

impl Control for ControlSignal {
    fn value(&self, t: f64) -> f64 {
        let s = t - self.window_offset;
        if s < 0.0 || s > self.horizon {
            0.0
        } else {
            self.p_local(s)
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.window_offset, self.window_offset + self.horizon]
    }

    fn vanishes_on(&self, a: f64, b: f64) -> bool {
        self.is_zero() || b <= self.window_offset || a >= self.window_offset + self.horizon
    }
}

impl Windowed for ControlSignal {
    fn support(&self) -> (f64, f64) {
        (self.window_offset, self.window_offset + self.horizon)
    }
}

/// Minimum-norm solution with the default residual tolerance.
pub fn solve_min_norm(mp: &MomentProblem) -> Result<ControlSignal> {
    solve_min_norm_with(mp, DEFAULT_TOL_RES)
}

/// Solve `G̃ c̃ = m̃` by Cholesky plus one step of iterative refinement.
pub fn solve_min_norm_with(mp: &MomentProblem, tol_res: f64) -> Result<ControlSignal> {
    let GramSystem {
        matrix,
        shifted_targets,
        condition,
    } = mp.gram();
    let (chol, regularized) = factor(&matrix).ok_or(Error::SynthesisFailure {
        max_residual: f64::INFINITY,
        residuals: vec![],
    })?;
    let mut c = chol.solve(&shifted_targets);
    let r = residual(&matrix, &c, &shifted_targets);
    c += chol.solve(&r);
    let r = residual(&matrix, &c, &shifted_targets);
    let scaled: Vec<f64> = r
        .iter()
        .zip(shifted_targets.iter())
        .map(|(r, m)| r.abs() / (1.0 + m.abs()))
        .collect();
    let max_residual = scaled.iter().copied().fold(0.0, f64::max);
    if !(max_residual <= tol_res) {
        return Err(Error::SynthesisFailure {
            max_residual,
            residuals: scaled,
        });
    }
    let coefficients: Vec<f64> = c.iter().copied().collect();
    let q_norm_sq = quadratic_form(&matrix, &coefficients);
    Ok(ControlSignal {
        horizon: mp.horizon,
        shift_lambda: mp.shift_lambda,
        frame_shift: mp.frame_shift,
        frequencies: mp.frequencies.clone(),
        coefficients,
        window_offset: 0.0,
        regularized,
        max_residual,
        q_norm_sq,
        condition,
    })
}

/// `‖p‖_{L²(0,T)}` in closed form:
/// `‖p‖² = e^{-2σT} Σ_{kl} c̃_k c̃_l (1 - e^{-(ω_k+ω_l-2σ)T})/(ω_k+ω_l-2σ)`.
pub fn control_l2_norm(cs: &ControlSignal) -> f64 {
    if cs.is_zero() {
        return 0.0;
    }
    let sigma = cs.shift_lambda;
    let shifted: Vec<f64> = cs.frequencies.iter().map(|w| w - sigma).collect();
    let p = gram_matrix(&shifted, cs.horizon);
    let form = quadratic_form(&p, &cs.coefficients).max(0.0);
    (-sigma * cs.horizon).exp() * form.sqrt()
}

/// Evaluate `p(t)` at absolute time `t`; errors outside the window.
pub fn eval_control(cs: &ControlSignal, t_abs: f64) -> Result<f64> {
    let (a, b) = cs.support();
    let slack = 1e-12 * (1.0 + b.abs());
    if t_abs < a - slack || t_abs > b + slack {
        return Err(Error::OutOfWindow {
            t: t_abs,
            start: a,
            end: b,
        });
    }
    Ok(cs.p_local((t_abs - a).clamp(0.0, cs.horizon)))
}

/// Largest `‖p‖` over unit data on the controlled modes, scaled by
/// `max(1, e^{-σT})`: `√λ_max(W G̃⁻¹ W)` with `W = diag(e^{-ω_k T}/|b_jk|)`.
pub fn empirical_cost(problem: &SpectralProblem, j: usize, horizon: f64, n_ctrl: usize) -> Result<f64> {
    let mp = build_moment_problem(problem, j, &vec![0.0; n_ctrl], horizon, n_ctrl)?;
    cost_of(&mp)
}

/// Cost of the moment problem's frequencies and couplings (targets ignored).
pub fn cost_of(mp: &MomentProblem) -> Result<f64> {
    let g = gram_matrix(&mp.frequencies, mp.horizon);
    let (chol, _) = factor(&g).ok_or(Error::SynthesisFailure {
        max_residual: f64::INFINITY,
        residuals: vec![],
    })?;
    let n = mp.n_ctrl();
    let w = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        mp.frequencies
            .iter()
            .zip(&mp.couplings)
            .map(|(om, b)| (-om * mp.horizon).exp() / b.abs()),
    ));
    let mut x = w;
    if !chol.l_dirty().solve_lower_triangular_mut(&mut x) {
        return Err(Error::SynthesisFailure {
            max_residual: f64::INFINITY,
            residuals: vec![],
        });
    }
    let smax = x.singular_values().iter().copied().fold(0.0, f64::max);
    Ok((-mp.shift_lambda * mp.horizon).exp().max(1.0) * smax)
}
