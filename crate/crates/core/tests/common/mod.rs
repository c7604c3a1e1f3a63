//! Independent reference computations shared by the integration targets.
#![allow(dead_code)]

use std::f64::consts::{E, LN_2, PI};

use eigensteer::constants::CostModel;
use eigensteer::spectral::{ProblemKind, SpectralProblem};
use eigensteer::steering::SteeringConfig;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre rule with `panels` equal panels.
pub struct Composite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panels: usize,
}

impl Composite {
    pub fn new(order: usize, panels: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Composite { nodes, weights, panels }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let h = (b - a) / self.panels as f64;
        let mut total = 0.0;
        for p in 0..self.panels {
            let mid = a + (p as f64 + 0.5) * h;
            let mut s = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                s += w * f(mid + 0.5 * h * x);
            }
            total += 0.5 * h * s;
        }
        total
    }
}

/// Eigenvalue of each gallery problem, 1-based.
pub fn eigenvalue(kind: ProblemKind, k: usize) -> f64 {
    let kf = k as f64;
    match kind {
        ProblemKind::DirichletX2 | ProblemKind::RadialX2 => (kf * PI).powi(2),
        ProblemKind::NeumannX2 => ((kf - 1.0) * PI).powi(2),
        ProblemKind::VarCoeffX => 0.25 + (kf * PI / LN_2).powi(2),
    }
}

/// `⟨μφ_j, φ_k⟩` by composite quadrature of the defining integral in the
/// problem's own variable.
pub fn coupling_quadrature(rule: &Composite, kind: ProblemKind, j: usize, k: usize) -> f64 {
    let (jf, kf) = (j as f64, k as f64);
    match kind {
        ProblemKind::DirichletX2 => rule.integrate(
            |x| x * x * 2f64.sqrt() * (jf * PI * x).sin() * 2f64.sqrt() * (kf * PI * x).sin(),
            0.0,
            1.0,
        ),
        ProblemKind::NeumannX2 => {
            let phi = move |m: usize, x: f64| {
                if m == 1 {
                    1.0
                } else {
                    2f64.sqrt() * ((m - 1) as f64 * PI * x).cos()
                }
            };
            rule.integrate(|x| x * x * phi(j, x) * phi(k, x), 0.0, 1.0)
        }
        ProblemKind::VarCoeffX => {
            let phi = |m: f64, x: f64| (2.0 / LN_2).sqrt() / (1.0 + x).sqrt() * (m * PI / LN_2 * (1.0 + x).ln()).sin();
            rule.integrate(|x| x * phi(jf, x) * phi(kf, x), 0.0, 1.0)
        }
        ProblemKind::RadialX2 => {
            let phi = |m: f64, r: f64| (m * PI * r).sin() / ((2.0 * PI).sqrt() * r);
            rule.integrate(|r| r * r * phi(jf, r) * phi(kf, r) * 4.0 * PI * r * r, 0.0, 1.0)
        }
    }
}

/// Closed form of the sine-basis `x²` coupling.
pub fn sine_x2_closed(j: usize, k: usize) -> f64 {
    let (jf, kf) = (j as f64, k as f64);
    if j == k {
        1.0 / 3.0 - 1.0 / (2.0 * (jf * PI).powi(2))
    } else {
        let sign = if (j + k).is_multiple_of(2) { 1.0 } else { -1.0 };
        8.0 * jf * kf * sign / (PI * PI * (kf * kf - jf * jf).powi(2))
    }
}

/// Closed form of the variable-coefficient coupling after the change of
/// variable `y = log₂(1+x)`.
pub fn varcoeff_closed(j: usize, k: usize) -> f64 {
    let i = |m: usize| {
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        LN_2 * (2.0 * sign - 1.0) / (LN_2 * LN_2 + (m as f64 * PI).powi(2))
    };
    i(j.abs_diff(k)) - i(j + k) - if j == k { 1.0 } else { 0.0 }
}

/// `∫₀^T e^{-xs} ds`.
pub fn decay_integral(x: f64, t: f64) -> f64 {
    if x == 0.0 {
        t
    } else {
        -(-x * t).exp_m1() / x
    }
}

/// `ln K(T)` from `K² = ‖B‖² N² e^{(4σ+‖B‖+1)T + 2‖B‖√T} (1 + ‖B‖N²)`.
pub fn log_k(t: f64, log_n: f64, b: f64, sigma: f64) -> f64 {
    let log_one_plus = {
        let x = b.ln() + 2.0 * log_n;
        if x > 0.0 {
            x + (-x).exp().ln_1p()
        } else {
            x.exp().ln_1p()
        }
    };
    0.5 * (2.0 * b.ln() + 2.0 * log_n + (4.0 * sigma + b + 1.0) * t + 2.0 * b * t.sqrt() + log_one_plus)
}

/// `C₁(T, r) = e^{(2σ+‖B‖)T + 2‖B‖N√T r}(1 + ‖B‖N²)`, in log form.
pub fn log_c1(t: f64, r: f64, n: f64, b: f64, sigma: f64) -> f64 {
    (2.0 * sigma + b) * t + 2.0 * b * n * t.sqrt() * r + (b * n * n).ln_1p()
}

/// `D = 2‖B‖ e^{2σ + 3‖B‖/2 + 1/2} max(1, ‖B‖)` and `Γ₀ = 2ν + max(ln D, 0)`.
pub fn gamma0(nu: f64, b: f64, sigma: f64) -> f64 {
    let log_d = (2.0 * b).ln() + 2.0 * sigma + 1.5 * b + 0.5 + b.max(1.0).ln();
    2.0 * nu + log_d.max(0.0)
}

/// `T1 = min(6T/π², 1, T0)`.
pub fn first_window(t: f64, t0: f64) -> f64 {
    (6.0 * t / (PI * PI)).min(1.0).min(t0)
}

/// `Γ_j` of the sufficient condition from its ingredients.
pub fn gamma_j(c: f64, alpha: f64, q: f64, b: f64, b_jj: f64, l1: f64, l2: f64) -> f64 {
    let m = c * c * (1.0 + 1.0 / (alpha * alpha)).powi(2) + 2.0 * l1.abs();
    let cq = 2.0 * (2.0 * q / E).powf(2.0 * q);
    let cqa = 2.0 * gamma_fn(2.0 * q + 1.0) / (alpha * (l2 - l1).sqrt());
    let extra = [
        3.0 * m / (b_jj * b_jj),
        3.0 * m * cq / (b * b),
        3.0 * m * cqa / (b * b),
        1.0,
    ]
    .into_iter()
    .fold(0.0f64, f64::max)
    .ln();
    0.5 * (m + m * m / 4.0 + (2.0 * q + 5.0) * E + extra)
}

/// `Γ(x)` for the half-integer and integer arguments used here.
pub fn gamma_fn(x: f64) -> f64 {
    // Γ(x) = (x-1)Γ(x-1) down to Γ(1) = 1 or Γ(1/2) = √π.
    let mut v = if (x - x.round()).abs() < 1e-12 { 1.0 } else { PI.sqrt() };
    let mut y = if (x - x.round()).abs() < 1e-12 { 1.0 } else { 0.5 };
    while y < x - 1e-12 {
        v *= y;
        y += 1.0;
    }
    v
}

/// Empirical decay constant `min_{k≤K, k≠j} |λ_k - λ_j|^q |b_jk|`.
pub fn decay_constant(p: &SpectralProblem, j: usize, k_max: usize) -> f64 {
    (1..=k_max)
        .filter(|&k| k != j)
        .map(|k| (p.eigenvalue(k) - p.eigenvalue(j)).abs().powf(p.decay_exponent) * p.b_entry(j, k).unwrap().abs())
        .fold(f64::INFINITY, f64::min)
}

/// Steering configuration with the automatic cost model on `[0, 1]`.
pub fn auto_config(p: &SpectralProblem, j: usize) -> SteeringConfig {
    let s = eigensteer::constants::compute_suffcond(p, j, 1.0).unwrap();
    let mut cfg = SteeringConfig::new(CostModel::from_suffcond_on(p, &s, 1.0).unwrap());
    cfg.suffcond = Some(s);
    cfg
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
