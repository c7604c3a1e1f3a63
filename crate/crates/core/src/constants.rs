//! Closed-form constants of the local steering theorem, the sufficient
//! condition on the control cost, and the window schedule.
//!
//! Quantities that routinely leave the binary64 range (`R_T`, `G_M`, control
//! budgets) are carried as natural logarithms alongside a saturated value.

use std::f64::consts::{E, PI};

use serde::Serialize;
use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::error::{Error, Result};
use crate::numerics::{exp_or_saturate, log_add_exp, log_sum_exp};
use crate::spectral::{verify_decay, SpectralProblem, DECAY_SCAN};

const PI2: f64 = PI * PI;

/// Control cost model `N(τ) ≤ e^{ν/τ}` for `0 < τ ≤ T0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostModel {
    pub nu: f64,
    pub t0: f64,
}

impl CostModel {
    pub fn new(nu: f64, t0: f64) -> Result<Self> {
        if !(nu > 0.0 && t0 > 0.0 && nu.is_finite() && t0.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "cost model needs nu, T0 > 0 (got {nu}, {t0})"
            )));
        }
        Ok(CostModel { nu, t0 })
    }

    /// Cost model delivered by the sufficient condition: `ν = Γ_j` on the
    /// horizon `T0 = min(1, 1/α²)`.
    pub fn from_suffcond(problem: &SpectralProblem, s: &SuffCondConstants) -> Self {
        CostModel {
            nu: s.gamma_j,
            t0: natural_horizon(problem),
        }
    }

    /// The same bound re-expressed on a longer horizon `t0`. The cost is
    /// nonincreasing in the horizon, so `N(τ) ≤ e^{Γ_j/T*}` on `[T*, t0]` and
    /// `ν = Γ_j·t0/T*` keeps the estimate valid on all of `(0, t0]`.
    pub fn from_suffcond_on(problem: &SpectralProblem, s: &SuffCondConstants, t0: f64) -> Result<Self> {
        let natural = natural_horizon(problem);
        CostModel::new(s.gamma_j * (t0 / natural).max(1.0), t0)
    }
}

/// `min(1, 1/α²)`.
pub fn natural_horizon(problem: &SpectralProblem) -> f64 {
    (1.0 / (problem.gap_alpha * problem.gap_alpha)).min(1.0)
}

/// `D = 2‖B‖ e^{2σ + 3‖B‖/2 + 1/2} max(1, ‖B‖)`.
pub fn compute_d(b_norm: f64, sigma: f64) -> f64 {
    2.0 * b_norm * (2.0 * sigma + 1.5 * b_norm + 0.5).exp() * b_norm.max(1.0)
}

/// `Γ₀ = 2ν + max(ln D, 0)`.
pub fn compute_gamma0(cost: &CostModel, d: f64) -> f64 {
    2.0 * cost.nu + d.ln().max(0.0)
}

/// Window lengths `T_n = T1/n²` accumulating to `τ_n → Tf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Schedule {
    pub t1: f64,
    pub tf: f64,
}

impl Schedule {
    /// Length of window `n` (1-based).
    pub fn window(&self, n: usize) -> f64 {
        self.t1 / (n as f64 * n as f64)
    }

    /// End time `τ_n` of window `n`; `τ_0 = 0`.
    pub fn tau(&self, n: usize) -> f64 {
        // Summing small terms first keeps the partial sums reproducible.
        (1..=n).rev().map(|m| self.window(m)).sum()
    }

    /// `(T_n, τ_n)` for `n = 1..=count`.
    pub fn pairs(&self, count: usize) -> Vec<(f64, f64)> {
        (1..=count).map(|n| (self.window(n), self.tau(n))).collect()
    }
}

/// `T1 = min(6T/π², 1, T0)` and `Tf = min(T, π²/6, π²T0/6)`.
pub fn compute_schedule(horizon: f64, t0: f64) -> Result<Schedule> {
    if !(horizon > 0.0 && t0 > 0.0) {
        return Err(Error::InvalidArgument("schedule needs T, T0 > 0".into()));
    }
    let t1 = (6.0 * horizon / PI2).min(1.0).min(t0);
    let tf = horizon.min(PI2 / 6.0).min(PI2 * t0 / 6.0);
    Ok(Schedule { t1, tf })
}

/// Everything the local steering theorem needs for one horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteeringConstants {
    pub horizon: f64,
    pub nu: f64,
    pub t0: f64,
    pub b_norm: f64,
    pub sigma: f64,
    pub d: f64,
    pub gamma0: f64,
    pub t1: f64,
    pub tf: f64,
    /// `R_T = e^{-6Γ₀/T1}` (usually underflows to 0).
    pub rt: f64,
    pub log_rt: f64,
}

impl SteeringConstants {
    pub fn new(cost: &CostModel, b_norm: f64, sigma: f64, horizon: f64) -> Result<Self> {
        let sched = compute_schedule(horizon, cost.t0)?;
        let d = compute_d(b_norm, sigma);
        let gamma0 = compute_gamma0(cost, d);
        let log_rt = -6.0 * gamma0 / sched.t1;
        Ok(SteeringConstants {
            horizon,
            nu: cost.nu,
            t0: cost.t0,
            b_norm,
            sigma,
            d,
            gamma0,
            t1: sched.t1,
            tf: sched.tf,
            rt: log_rt.exp(),
            log_rt,
        })
    }

    pub fn schedule(&self) -> Schedule {
        Schedule {
            t1: self.t1,
            tf: self.tf,
        }
    }
}

/// Both sides of `Σ_{j=0}^n j²/2^j = 2^{-n}(-n² - 4n + 6(2^n - 1))`.
pub fn weighted_sum_identity(n: u32) -> (f64, f64) {
    let lhs: f64 = (0..=n).map(|j| (j as f64).powi(2) / 2f64.powi(j as i32)).sum();
    let nf = n as f64;
    let p = 2f64.powi(n as i32);
    let rhs = (-nf * nf - 4.0 * nf + 6.0 * (p - 1.0)) / p;
    (lhs, rhs)
}

/// `ln K(T)` with `ln N(T)` supplied, so that `N = e^{ν/T}` never overflows.
pub fn log_kt(horizon: f64, log_nt: f64, b_norm: f64, sigma: f64) -> f64 {
    let expo = (4.0 * sigma + b_norm + 1.0) * horizon + 2.0 * b_norm * horizon.sqrt();
    let tail = log_add_exp(0.0, b_norm.ln() + 2.0 * log_nt);
    0.5 * (2.0 * b_norm.ln() + 2.0 * log_nt + expo + tail)
}

/// `K(T) = ‖B‖ N e^{((4σ+‖B‖+1)T + 2‖B‖√T)/2} √(1 + ‖B‖N²)`.
pub fn compute_kt(horizon: f64, nt: f64, b_norm: f64, sigma: f64) -> f64 {
    if nt == 0.0 {
        return 0.0;
    }
    exp_or_saturate(log_kt(horizon, nt.ln(), b_norm, sigma))
}

/// Constants of the sufficient condition for the cost estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuffCondConstants {
    pub c: f64,
    pub j: usize,
    pub alpha: f64,
    pub q: f64,
    /// Decay constant `b` (empirical infimum over `k ≤ DECAY_SCAN`).
    pub b: f64,
    /// Diagonal coupling `⟨Bφ_j, φ_j⟩`.
    pub b_jj: f64,
    pub m: f64,
    pub cq: f64,
    pub cqa: f64,
    pub gamma_j: f64,
}

/// Evaluate `M`, `C_q`, `C_{q,α}` and `Γ_j` for the problem and target index.
pub fn compute_suffcond(problem: &SpectralProblem, j: usize, c: f64) -> Result<SuffCondConstants> {
    if !(c >= 1.0) {
        return Err(Error::InvalidArgument(format!("C must be >= 1, got {c}")));
    }
    let b_jj = problem.b_entry(j, j)?;
    if b_jj == 0.0 {
        return Err(Error::DegenerateCoupling { j, k: j });
    }
    let b = if j == 1 {
        problem.decay_b()?
    } else {
        verify_decay(problem, j, DECAY_SCAN)?
    };
    let alpha = problem.gap_alpha;
    let q = problem.decay_exponent;
    let l1 = problem.eigenvalue(1);
    let l2 = problem.eigenvalue(2);
    let m = c * c * (1.0 + 1.0 / (alpha * alpha)).powi(2) + 2.0 * l1.abs();
    let cq = 2.0 * (2.0 * q / E).powf(2.0 * q);
    let cqa = 2.0 * ln_gamma(2.0 * q + 1.0).exp() / (alpha * (l2 - l1).sqrt());
    let b2 = b * b;
    let extra = [
        (3.0 * m / (b_jj * b_jj)).ln(),
        (3.0 * m * cq / b2).ln(),
        (3.0 * m * cqa / b2).ln(),
        0.0,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    let two_gamma = m + m * m / 4.0 + (2.0 * q + 5.0) * E + extra;
    Ok(SuffCondConstants {
        c,
        j,
        alpha,
        q,
        b,
        b_jj,
        m,
        cq,
        cqa,
        gamma_j: 0.5 * two_gamma,
    })
}

/// `ln Γ(s, x)`, the upper incomplete gamma function, for `s > 0`, `x ≥ 0`.
pub fn ln_upper_gamma(s: f64, x: f64) -> f64 {
    if x < s + 1.0 {
        return gamma_ur(s, x).ln() + ln_gamma(s);
    }
    // Modified Lentz evaluation of the continued fraction for Γ(s,x) e^x x^{-s}.
    let tiny = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    -x + s * x.ln() + h.ln()
}

/// Truncated value of `G_M(T)` with a rigorous bound on the remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GmEstimate {
    pub log_value: f64,
    pub log_tail: f64,
    pub value: f64,
    pub tail: f64,
}

impl GmEstimate {
    /// `ln(value + tail)`.
    pub fn log_total(&self) -> f64 {
        log_add_exp(self.log_value, self.log_tail)
    }
}

/// `G_M(T) = (M/T⁴) e^{M/T} Σ_k e^{-2ω_k T + M√ω_k} / ⟨Bφ_j,φ_k⟩²` summed to
/// `trunc`, with `ω_k = λ_k - λ_1`.
///
/// The remainder over `k > trunc` is bounded using `|⟨Bφ_j,φ_k⟩| ≥ b/ω_k^q`,
/// the spacing `ω_{k+1} - ω_k ≥ α√ω_2`, and monotonicity of
/// `e^{-ωT + M√ω}` and `ω^{2q} e^{-ωT}` past `ω_trunc`, giving
///
/// ```text
/// tail ≤ (M/T⁴) e^{M/T} e^{-ω_t T + M√ω_t} Γ(2q+1, ω_t T) / (b² T^{2q+1} α √ω_2).
/// ```
///
/// When `ω_trunc` is below the monotonicity thresholds the bound does not
/// apply and a truncation error is returned.
pub fn compute_gm(m: f64, horizon: f64, problem: &SpectralProblem, j: usize, trunc: usize) -> Result<GmEstimate> {
    if !(horizon > 0.0) || trunc < j.max(2) {
        return Err(Error::InvalidArgument(format!(
            "need T > 0 and trunc >= max(j, 2), got T = {horizon}, trunc = {trunc}"
        )));
    }
    let t = horizon;
    let l1 = problem.eigenvalue(1);
    let omega = |k: usize| problem.eigenvalue(k) - l1;
    let q = problem.decay_exponent;
    let needed = (m / (2.0 * t)).powi(2).max(2.0 * q / t);
    if omega(trunc) < needed {
        let mut required = trunc + 1;
        while omega(required) < needed {
            required += 1;
        }
        return Err(Error::TruncationTooSmall { trunc, required });
    }
    let log_pref = m.ln() - 4.0 * t.ln() + m / t;
    let mut terms = Vec::with_capacity(trunc);
    for k in 1..=trunc {
        let b = problem.b_entry(j, k)?;
        if b == 0.0 {
            return Err(Error::DegenerateCoupling { j, k });
        }
        let w = omega(k);
        terms.push(-2.0 * w * t + m * w.sqrt() - 2.0 * b.abs().ln());
    }
    let log_value = log_pref + log_sum_exp(terms);
    let b = if j == 1 {
        problem.decay_b()?
    } else {
        verify_decay(problem, j, DECAY_SCAN)?
    };
    let wt = omega(trunc);
    let spacing = problem.gap_alpha * omega(2).sqrt();
    let log_tail = log_pref - 2.0 * b.ln() + (-wt * t + m * wt.sqrt()) + ln_upper_gamma(2.0 * q + 1.0, wt * t)
        - (2.0 * q + 1.0) * t.ln()
        - spacing.ln();
    Ok(GmEstimate {
        log_value,
        log_tail,
        value: exp_or_saturate(log_value),
        tail: exp_or_saturate(log_tail),
    })
}

/// `ln` of `e^{-π²Γ₀/T} / (e^{2π²Γ₀/(3T)} - 1)`.
pub fn log_control_norm_bound(gamma0: f64, horizon: f64) -> f64 {
    let x = 2.0 * PI2 * gamma0 / (3.0 * horizon);
    let log_den = if x > 30.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    };
    -PI2 * gamma0 / horizon - log_den
}

/// `e^{-π²Γ₀/T} / (e^{2π²Γ₀/(3T)} - 1)`.
pub fn control_norm_bound(gamma0: f64, horizon: f64) -> f64 {
    log_control_norm_bound(gamma0, horizon).exp()
}
