//! Spectral data of the four gallery problems.
//!
//! Every problem is a self-adjoint operator `A` with an orthonormal eigenbasis
//! `φ_k` (1-based) and a multiplication operator `B u = μ u`. The library works
//! entirely in eigencoordinates, so a problem is described by its eigenvalues
//! and the coupling entries `⟨Bφ_j, φ_k⟩`.
//!
//! # Coupling normalization
//!
//! For `μ(x) = x²` with the Dirichlet basis `√2 sin(kπx)` the off-diagonal
//! entries evaluate to
//!
//! ```text
//! ⟨Bφ_j, φ_k⟩ = 8 k j (-1)^{k+j} / (π² (k² - j²)²),   k ≠ j,
//! ```
//!
//! which is what adaptive quadrature of the defining integral returns (for
//! instance `(3,5) → 0.047494304832345…`). Printed variants of this formula
//! with numerator `4kj` and with or without `π²` disagree with quadrature and
//! are not used. The radial-ball entries reduce to the same integral: with
//! `φ_k = sin(kπr)/(√(2π) r)` and the measure `4πr² dr`, the weight collapses to
//! `2 r² sin(jπr) sin(kπr)`, so both problems share one closed form.
//!
//! The Neumann problem is indexed from 0 in its natural form (`φ_0 = 1`); here
//! index 1 refers to the constant mode and index `k` to `√2 cos((k-1)πx)`.
//!
//! The variable-coefficient problem has no closed-form coupling; entries are
//! obtained by adaptive quadrature in the variable `y = log₂(1+x)` and
//! memoized.

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI, SQRT_2};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::quadrature;

/// Absolute accuracy demanded from quadrature-computed entries.
pub const QUADRATURE_TOL: f64 = 1e-11;

/// Truncation used when estimating the decay constant `b`.
pub const DECAY_SCAN: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    /// `-u_xx` on (0,1), Dirichlet conditions, `μ = x²`.
    DirichletX2,
    /// `-u_xx` on (0,1), Neumann conditions, `μ = x²`.
    NeumannX2,
    /// `-((1+x)² u_x)_x` on (0,1), Dirichlet conditions, `μ = x`.
    VarCoeffX,
    /// Radial Dirichlet Laplacian on the unit ball of R³, `μ = r²`.
    RadialX2,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 4] = [
        ProblemKind::DirichletX2,
        ProblemKind::NeumannX2,
        ProblemKind::VarCoeffX,
        ProblemKind::RadialX2,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ProblemKind::DirichletX2 => "dirichlet-x2",
            ProblemKind::NeumannX2 => "neumann-x2",
            ProblemKind::VarCoeffX => "varcoeff-x",
            ProblemKind::RadialX2 => "radial-x2",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.id() == id)
            .ok_or_else(|| Error::UnknownProblem(id.to_string()))
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// One gallery problem. Cheap to clone; the quadrature memo is shared.
#[derive(Debug, Clone)]
pub struct SpectralProblem {
    pub kind: ProblemKind,
    /// Lower bound `A ≥ -σ`.
    pub sigma: f64,
    /// `sup |μ|`, the operator norm of the multiplication operator.
    pub b_norm: f64,
    /// Claimed lower bound on `√λ_{k+1} - √λ_k`.
    pub gap_alpha: f64,
    /// Exponent `q` in `|λ_k - λ_j|^q |⟨Bφ_j,φ_k⟩| ≥ b`.
    pub decay_exponent: f64,
    /// Index of the first eigenfunction in the problem's natural numbering.
    pub index_origin: usize,
    memo: Arc<Mutex<HashMap<(usize, usize), f64>>>,
    decay_b: Arc<OnceLock<Result<f64>>>,
}

/// The free trajectory `ψ_j(t) = e^{-λ_j t} φ_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigensolutionTarget {
    pub j: usize,
    pub lambda_j: f64,
}

impl EigensolutionTarget {
    /// Amplitude `e^{-λ_j t}` of the target at time `t`.
    pub fn amplitude(&self, t: f64) -> f64 {
        (-self.lambda_j * t).exp()
    }
}

impl SpectralProblem {
    fn new(kind: ProblemKind, gap_alpha: f64, decay_exponent: f64, index_origin: usize) -> Self {
        SpectralProblem {
            kind,
            sigma: 0.0,
            b_norm: 1.0,
            gap_alpha,
            decay_exponent,
            index_origin,
            memo: Arc::default(),
            decay_b: Arc::default(),
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        Ok(Self::from_kind(ProblemKind::from_id(id)?))
    }

    pub fn from_kind(kind: ProblemKind) -> Self {
        match kind {
            ProblemKind::DirichletX2 => make_dirichlet_x2(),
            ProblemKind::NeumannX2 => make_neumann_x2(),
            ProblemKind::VarCoeffX => make_variable_coeff_x(),
            ProblemKind::RadialX2 => make_radial_ball_x2(),
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind.id()
    }

    /// `λ_k` for the 1-based index `k`.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k >= 1, "eigen indices are 1-based");
        let kf = k as f64;
        match self.kind {
            ProblemKind::DirichletX2 | ProblemKind::RadialX2 => (kf * PI).powi(2),
            ProblemKind::NeumannX2 => ((kf - 1.0) * PI).powi(2),
            ProblemKind::VarCoeffX => 0.25 + (kf * PI / LN_2).powi(2),
        }
    }

    /// `λ_1, …, λ_n`.
    pub fn eigenvalues(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|k| self.eigenvalue(k)).collect()
    }

    pub fn target(&self, j: usize) -> EigensolutionTarget {
        EigensolutionTarget {
            j,
            lambda_j: self.eigenvalue(j),
        }
    }

    /// `⟨Bφ_j, φ_k⟩` for 1-based indices.
    pub fn b_entry(&self, j: usize, k: usize) -> Result<f64> {
        if j == 0 || k == 0 {
            return Err(Error::InvalidArgument("eigen indices are 1-based".into()));
        }
        Ok(match self.kind {
            ProblemKind::DirichletX2 | ProblemKind::RadialX2 => sine_x2_entry(j, k),
            ProblemKind::NeumannX2 => cosine_x2_entry(j - 1, k - 1),
            ProblemKind::VarCoeffX => self.varcoeff_entry(j, k)?,
        })
    }

    /// The `n × n` coupling matrix `B_{kl} = ⟨Bφ_l, φ_k⟩`.
    pub fn b_matrix(&self, n: usize) -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            for l in k..n {
                let v = self.b_entry(k + 1, l + 1)?;
                m[(k, l)] = v;
                m[(l, k)] = v;
            }
        }
        Ok(m)
    }

    /// Decay constant `b`, estimated as `verify_decay(self, 1, DECAY_SCAN)`.
    pub fn decay_b(&self) -> Result<f64> {
        self.decay_b.get_or_init(|| verify_decay(self, 1, DECAY_SCAN)).clone()
    }

    fn varcoeff_entry(&self, j: usize, k: usize) -> Result<f64> {
        let key = (j.min(k), j.max(k));
        if let Some(v) = self.memo.lock().expect("memo poisoned").get(&key) {
            return Ok(*v);
        }
        let (jf, kf) = (j as f64 * PI, k as f64 * PI);
        // x = 2^y - 1 maps φ_j φ_k dx to 2 sin(jπy) sin(kπy) dy.
        let integrand = |y: f64| 2.0 * (y * LN_2).exp_m1() * (jf * y).sin() * (kf * y).sin();
        let q = quadrature::integrate(integrand, 0.0, 1.0, 1e-14, 0.0, 4000);
        if !q.converged || q.error > QUADRATURE_TOL {
            return Err(Error::QuadratureFailure {
                j,
                k,
                tol: QUADRATURE_TOL,
                estimate: q.error,
            });
        }
        self.memo.lock().expect("memo poisoned").insert(key, q.value);
        Ok(q.value)
    }
}

/// `2∫₀¹ x² sin(jπx) sin(kπx) dx`.
fn sine_x2_entry(j: usize, k: usize) -> f64 {
    let (jf, kf) = (j as f64, k as f64);
    if j == k {
        let a = 2.0 * jf * jf * PI * PI;
        (a - 3.0) / (3.0 * a)
    } else {
        let sign = if (j + k).is_multiple_of(2) { 1.0 } else { -1.0 };
        let d = kf * kf - jf * jf;
        8.0 * kf * jf * sign / (PI * PI * d * d)
    }
}

/// `∫₀¹ x² φ_j φ_k dx` with `φ_0 = 1`, `φ_k = √2 cos(kπx)` (0-based indices).
fn cosine_x2_entry(j: usize, k: usize) -> f64 {
    let sign = if (j + k).is_multiple_of(2) { 1.0 } else { -1.0 };
    match (j, k) {
        (0, 0) => 1.0 / 3.0,
        (0, m) | (m, 0) => 2.0 * SQRT_2 * sign / (m as f64 * PI).powi(2),
        _ if j == k => 1.0 / 3.0 + 1.0 / (2.0 * (j as f64 * PI).powi(2)),
        _ => {
            let (jf, kf) = (j as f64, k as f64);
            let d = kf * kf - jf * jf;
            4.0 * sign * (kf * kf + jf * jf) / (d * d * PI * PI)
        }
    }
}

pub fn make_dirichlet_x2() -> SpectralProblem {
    SpectralProblem::new(ProblemKind::DirichletX2, PI, 1.5, 1)
}

pub fn make_neumann_x2() -> SpectralProblem {
    SpectralProblem::new(ProblemKind::NeumannX2, PI, 1.0, 0)
}

pub fn make_variable_coeff_x() -> SpectralProblem {
    SpectralProblem::new(ProblemKind::VarCoeffX, PI / LN_2, 1.5, 1)
}

pub fn make_radial_ball_x2() -> SpectralProblem {
    SpectralProblem::new(ProblemKind::RadialX2, PI, 1.5, 1)
}

/// All four problems in a fixed order.
pub fn gallery() -> Vec<SpectralProblem> {
    ProblemKind::ALL.into_iter().map(SpectralProblem::from_kind).collect()
}

/// `min_{k<K} √λ_{k+1} - √λ_k`.
pub fn verify_gap(problem: &SpectralProblem, k_max: usize) -> f64 {
    assert!(k_max >= 2, "need at least two eigenvalues");
    (1..k_max)
        .map(|k| problem.eigenvalue(k + 1).sqrt() - problem.eigenvalue(k).sqrt())
        .fold(f64::INFINITY, f64::min)
}

/// `min_{k<K} √(λ_{k+1} - λ_1) - √(λ_k - λ_1)`, the gap measured relative to
/// the bottom of the spectrum.
pub fn verify_gap_relative(problem: &SpectralProblem, k_max: usize) -> f64 {
    assert!(k_max >= 2, "need at least two eigenvalues");
    let l1 = problem.eigenvalue(1);
    (1..k_max)
        .map(|k| (problem.eigenvalue(k + 1) - l1).sqrt() - (problem.eigenvalue(k) - l1).sqrt())
        .fold(f64::INFINITY, f64::min)
}

/// `min_{k≤K, k≠j} |λ_k - λ_j|^q |⟨Bφ_j,φ_k⟩|`, an empirical estimate of `b`.
pub fn verify_decay(problem: &SpectralProblem, j: usize, k_max: usize) -> Result<f64> {
    if j == 0 || k_max <= j {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= j < K, got j = {j}, K = {k_max}"
        )));
    }
    let lj = problem.eigenvalue(j);
    let mut best = f64::INFINITY;
    for k in (1..=k_max).filter(|&k| k != j) {
        let b = problem.b_entry(j, k)?;
        if b == 0.0 {
            return Err(Error::DegenerateCoupling { j, k });
        }
        let v = (problem.eigenvalue(k) - lj).abs().powf(problem.decay_exponent) * b.abs();
        best = best.min(v);
    }
    Ok(best)
}
