//! Time integration of the Galerkin-truncated bilinear system.
//!
//! States are eigencoefficient vectors. In the frame `A - λ_f` the bilinear
//! system reads `x' = -(Λ - λ_f) x - p(t) B (x + e)` where `e` is an optional
//! fixed offset (`e_j` when `x` is the deviation from `φ_j`). The linearized
//! system drops the state-dependent part: `y' = -(Λ - λ_f) y - p(t) B e_j`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::constants::compute_kt;
use crate::control::Control;
use crate::error::{Error, Result};
use crate::moment::ControlSignal;
use crate::numerics::{decay_integral, dot2, norm};
use crate::spectral::SpectralProblem;

/// Integration scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scheme {
    /// Exact diagonal half-steps around an explicit midpoint coupling step.
    Strang2,
    /// Closed-form variation of constants; only for the linearized system
    /// driven by a window control.
    DuhamelLinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub n_sim: usize,
    pub dt_max: f64,
    /// Per-step bound on `dt·‖B‖·(1 + |p|)`.
    pub tol_step: f64,
    pub scheme: Scheme,
    pub max_steps: usize,
    /// Record every `record_stride` steps; 0 records only segment endpoints.
    pub record_stride: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_sim: 30,
            dt_max: 1e-3,
            tol_step: 1e-5,
            scheme: Scheme::Strang2,
            max_steps: 20_000_000,
            record_stride: 0,
        }
    }
}

/// Sampled solution on `[t0, t1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub n_sim: usize,
    /// `max ‖x(t)‖` over every step, recorded or not.
    pub sup_norm: f64,
    /// `max ‖x(t) + e‖` over every step.
    pub sup_offset_norm: f64,
    pub steps: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap_or(&f64::NAN)
    }

    fn push(&mut self, t: f64, x: &DVector<f64>) {
        if self.times.last() == Some(&t) {
            *self.states.last_mut().expect("states track times") = x.iter().copied().collect();
        } else {
            self.times.push(t);
            self.states.push(x.iter().copied().collect());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Coupling {
    Bilinear,
    Linear,
}

/// Galerkin system `x' = -(Λ - λ_f) x - p B (x + e)` on the first `n` modes.
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    pub decay: Vec<f64>,
    pub coupling: DMatrix<f64>,
    pub offset: Option<usize>,
    pub b_norm: f64,
    column: Option<DVector<f64>>,
}

impl GalerkinSystem {
    /// `frame_shift` is subtracted from every eigenvalue; `offset` is the
    /// 1-based index `j` of a fixed `e_j` added to the state inside `B`.
    pub fn new(problem: &SpectralProblem, n: usize, frame_shift: f64, offset: Option<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n_sim must be positive".into()));
        }
        if let Some(j) = offset {
            if j == 0 || j > n {
                return Err(Error::InvalidArgument(format!("offset index {j} outside 1..={n}")));
            }
        }
        let coupling = problem.b_matrix(n)?;
        let column = offset.map(|j| coupling.column(j - 1).into_owned());
        Ok(GalerkinSystem {
            decay: (1..=n).map(|k| problem.eigenvalue(k) - frame_shift).collect(),
            coupling,
            offset,
            b_norm: problem.b_norm,
            column,
        })
    }

    pub fn dim(&self) -> usize {
        self.decay.len()
    }

    /// Integrate the bilinear system.
    pub fn integrate(
        &self,
        x0: &[f64],
        control: &dyn Control,
        window: (f64, f64),
        cfg: &SimConfig,
    ) -> Result<Trajectory> {
        self.run(x0, control, window, cfg, Coupling::Bilinear)
    }

    /// Integrate the linearized system `y' = -(Λ - λ_f) y - p B e_j` with the
    /// same splitting. Requires an offset index.
    pub fn integrate_linear(
        &self,
        y0: &[f64],
        control: &dyn Control,
        window: (f64, f64),
        cfg: &SimConfig,
    ) -> Result<Trajectory> {
        if self.offset.is_none() {
            return Err(Error::InvalidArgument(
                "linearized system needs the target index".into(),
            ));
        }
        self.run(y0, control, window, cfg, Coupling::Linear)
    }

    fn run(
        &self,
        x0: &[f64],
        control: &dyn Control,
        window: (f64, f64),
        cfg: &SimConfig,
        mode: Coupling,
    ) -> Result<Trajectory> {
        let n = self.dim();
        let (t0, t1) = window;
        if !(t1 >= t0) || !t0.is_finite() || !t1.is_finite() {
            return Err(Error::InvalidArgument(format!("bad window [{t0}, {t1}]")));
        }
        if x0.len() > n {
            return Err(Error::InvalidArgument(format!(
                "initial state has {} > {n} modes",
                x0.len()
            )));
        }
        if !(cfg.dt_max > 0.0 && cfg.tol_step > 0.0) {
            return Err(Error::InvalidArgument("dt_max and tol_step must be positive".into()));
        }
        let mut x = DVector::zeros(n);
        x.rows_mut(0, x0.len()).copy_from_slice(x0);

        let mut traj = Trajectory {
            times: vec![],
            states: vec![],
            n_sim: n,
            sup_norm: 0.0,
            sup_offset_norm: 0.0,
            steps: 0,
        };
        self.observe(&mut traj, &x);
        traj.push(t0, &x);

        let mut cuts: Vec<f64> = control
            .breakpoints()
            .into_iter()
            .filter(|b| *b > t0 && *b < t1)
            .collect();
        cuts.push(t1);
        let mut a = t0;
        for b in cuts {
            if b <= a {
                continue;
            }
            if control.vanishes_on(a, b) {
                self.free_flow(&mut x, b - a);
                traj.steps += 1;
                self.observe(&mut traj, &x);
            } else {
                self.stepped(&mut x, control, a, b, cfg, mode, &mut traj)?;
            }
            traj.push(b, &x);
            a = b;
        }
        Ok(traj)
    }

    fn observe(&self, traj: &mut Trajectory, x: &DVector<f64>) {
        traj.sup_norm = traj.sup_norm.max(norm(x.as_slice()));
        let shifted = match self.offset {
            Some(j) => {
                let mut y = x.clone();
                y[j - 1] += 1.0;
                norm(y.as_slice())
            }
            None => norm(x.as_slice()),
        };
        traj.sup_offset_norm = traj.sup_offset_norm.max(shifted);
    }

    fn free_flow(&self, x: &mut DVector<f64>, h: f64) {
        for (xi, mu) in x.iter_mut().zip(&self.decay) {
            *xi *= (-mu * h).exp();
        }
    }

    /// `B (x + e)` for the bilinear mode.
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = &self.coupling * x;
        if let Some(c) = &self.column {
            y += c;
        }
        y
    }

    #[allow(clippy::too_many_arguments)]
    fn stepped(
        &self,
        x: &mut DVector<f64>,
        control: &dyn Control,
        a: f64,
        b: f64,
        cfg: &SimConfig,
        mode: Coupling,
        traj: &mut Trajectory,
    ) -> Result<()> {
        let mut t = a;
        let mut half = Vec::new();
        let mut half_h = f64::NAN;
        let mut local_steps = 0usize;
        while t < b {
            let p0 = control.value(t);
            let mut h = cfg.dt_max.min(cfg.tol_step / (self.b_norm * (1.0 + p0.abs())));
            let rest = b - t;
            if h >= rest || rest - h < 1e-14 * b.abs().max(1.0) {
                h = rest;
            } else if h < 1e-12 {
                return Err(Error::Stiffness { t, dt: h });
            }
            if h != half_h {
                half = self.decay.iter().map(|mu| (-mu * 0.5 * h).exp()).collect();
                half_h = h;
            }
            for (xi, f) in x.iter_mut().zip(&half) {
                *xi *= f;
            }
            let pm = control.value(t + 0.5 * h);
            match mode {
                Coupling::Bilinear => {
                    let k1 = self.apply(x) * (-p0);
                    let mid = &*x + &k1 * (0.5 * h);
                    let k2 = self.apply(&mid) * (-pm);
                    *x += k2 * h;
                }
                Coupling::Linear => {
                    let c = self.column.as_ref().expect("linear mode has a forcing column");
                    *x -= c * (pm * h);
                }
            }
            for (xi, f) in x.iter_mut().zip(&half) {
                *xi *= f;
            }
            t = if h == rest { b } else { t + h };
            traj.steps += 1;
            local_steps += 1;
            if traj.steps > cfg.max_steps {
                return Err(Error::StepLimit { t, steps: traj.steps });
            }
            if !x.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite { t });
            }
            self.observe(traj, x);
            if cfg.record_stride > 0 && local_steps.is_multiple_of(cfg.record_stride) && t < b {
                traj.push(t, x);
            }
        }
        Ok(())
    }
}

/// Integrate `u' = -Λu - p(t) B u` on `window`.
pub fn simulate_bilinear(
    problem: &SpectralProblem,
    u0: &[f64],
    control: &dyn Control,
    window: (f64, f64),
    cfg: &SimConfig,
) -> Result<Trajectory> {
    GalerkinSystem::new(problem, cfg.n_sim, 0.0, None)?.integrate(u0, control, window, cfg)
}

/// Integrate the deviation `v = e^{λ_j t} u - φ_j`, which solves
/// `v' = -(Λ - λ_j) v - p B (v + e_j)`.
pub fn simulate_shifted(
    problem: &SpectralProblem,
    j: usize,
    v0: &[f64],
    control: &dyn Control,
    window: (f64, f64),
    cfg: &SimConfig,
) -> Result<Trajectory> {
    GalerkinSystem::new(problem, cfg.n_sim, problem.eigenvalue(j), Some(j))?.integrate(v0, control, window, cfg)
}

/// Terminal state of `y' + (A - λ_f) y + p Bφ_j = 0` on `[0, T]` for a window
/// control, where `λ_f = control.frame_shift`:
/// `y_k(T) = e^{-μ_k T} y0_k - b_jk ∫₀^T e^{-μ_k (T-s)} p(s) ds`.
/// The number of modes is `y0.len()`.
pub fn simulate_linear_duhamel(
    problem: &SpectralProblem,
    j: usize,
    y0: &[f64],
    control: &ControlSignal,
) -> Result<Vec<f64>> {
    let t = control.horizon;
    let sigma = control.shift_lambda;
    let scale = (-sigma * t).exp();
    let mut out = Vec::with_capacity(y0.len());
    for (idx, y) in y0.iter().enumerate() {
        let k = idx + 1;
        let mu = problem.eigenvalue(k) - control.frame_shift;
        let free = (-mu * t).exp() * y;
        if control.is_zero() {
            out.push(free);
            continue;
        }
        let b = problem.b_entry(j, k)?;
        // ∫₀^T e^{-μ(T-s)} e^{-σs} e^{ω(s-T)} ds = e^{-σT} ∫₀^T e^{-(μ+ω-σ) r} dr
        let weights: Vec<f64> = control
            .frequencies
            .iter()
            .map(|w| decay_integral(mu + w - sigma, t))
            .collect();
        let forced = b * scale * dot2(&weights, &control.coefficients);
        out.push(free - forced);
    }
    Ok(out)
}

/// Lower spectral bound `σ` of `A - λ_f`: `max(0, λ_f - λ_1, problem σ)`.
pub fn frame_sigma(problem: &SpectralProblem, frame_shift: f64) -> f64 {
    (frame_shift - problem.eigenvalue(1)).max(0.0).max(problem.sigma)
}

/// Outcome of an a-priori estimate check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AprioriCheck {
    pub holds: bool,
    pub measured: f64,
    pub bound: f64,
    /// `bound - measured`.
    pub slack: f64,
    /// False when the estimate's hypothesis `N(T)‖v0‖ ≤ 1` fails.
    pub precondition: bool,
}

/// `C₁(T, r) = e^{(2σ+‖B‖)T + 2‖B‖ N √T r} (1 + ‖B‖N²)`.
pub fn apriori_c1(horizon: f64, v0_norm: f64, nt: f64, b_norm: f64, sigma: f64) -> f64 {
    ((2.0 * sigma + b_norm) * horizon + 2.0 * b_norm * nt * horizon.sqrt() * v0_norm).exp() * (1.0 + b_norm * nt * nt)
}

/// `sup_t ‖v(t)‖² ≤ C₁(T, ‖v0‖) ‖v0‖²` along a deviation trajectory produced
/// in the frame of `control`.
pub fn check_apriori_v(
    problem: &SpectralProblem,
    traj: &Trajectory,
    control: &ControlSignal,
    v0_norm: f64,
    nt: f64,
) -> AprioriCheck {
    let sigma = frame_sigma(problem, control.frame_shift);
    let horizon = traj.final_time() - traj.times[0];
    let bound = apriori_c1(horizon, v0_norm, nt, problem.b_norm, sigma) * v0_norm * v0_norm;
    let measured = traj.sup_norm * traj.sup_norm;
    AprioriCheck {
        holds: measured <= bound,
        measured,
        bound,
        slack: bound - measured,
        precondition: true,
    }
}

/// `‖w(T)‖ ≤ K(T) ‖v0‖²` where `w = v - y` is the nonlinear remainder.
pub fn check_apriori_w(
    problem: &SpectralProblem,
    w_norm: f64,
    v0_norm: f64,
    horizon: f64,
    nt: f64,
    sigma: f64,
) -> AprioriCheck {
    let bound = compute_kt(horizon, nt, problem.b_norm, sigma) * v0_norm * v0_norm;
    AprioriCheck {
        holds: w_norm <= bound,
        measured: w_norm,
        bound,
        slack: bound - w_norm,
        precondition: nt * v0_norm <= 1.0,
    }
}
