//! Small floating-point kernels shared by the solver modules.

/// `(1 - e^{-x t}) / x`, continued to `t` at `x = 0`, without cancellation.
///
/// This equals `∫_0^t e^{-x r} dr` for every real `x`.
pub fn decay_integral(x: f64, t: f64) -> f64 {
    let xt = x * t;
    if xt.abs() < 1e-300 {
        t
    } else {
        -(-xt).exp_m1() / x
    }
}

/// Error-free transformation `a + b = s + e`.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Error-free transformation `a * b = p + e` using a fused multiply-add.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Dot product evaluated as if in twice the working precision.
pub fn dot2(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut s = 0.0;
    let mut c = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let (p, ep) = two_prod(a, b);
        let (t, es) = two_sum(s, p);
        s = t;
        c += ep + es;
    }
    s + c
}

/// Compensated sum of a slice.
pub fn sum2(x: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for &a in x {
        let (t, e) = two_sum(s, a);
        s = t;
        c += e;
    }
    s + c
}

/// `ln(e^a + e^b)` without overflow; `-inf` acts as the identity.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln Σ e^{x_i}`; returns `-inf` for an empty input.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, log_add_exp)
}

/// Euclidean norm as a natural logarithm, for vectors whose entries are given
/// through their logarithmic magnitudes.
pub fn log_norm_from_logs(log_abs: impl IntoIterator<Item = f64>) -> f64 {
    0.5 * log_sum_exp(log_abs.into_iter().map(|l| 2.0 * l))
}

/// Euclidean norm of a slice.
pub fn norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |acc, v| acc.hypot(*v))
}

/// Exponentiate a log-value when representable, otherwise saturate.
pub fn exp_or_saturate(log_value: f64) -> f64 {
    if log_value > f64::MAX.ln() {
        f64::INFINITY
    } else {
        log_value.exp()
    }
}
