use thiserror::Error;

/// Failures surfaced by the library. Every variant carries enough context to
/// be reported without re-running the computation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown problem id `{0}` (expected one of dirichlet-x2, neumann-x2, varcoeff-x, radial-x2)")]
    UnknownProblem(String),

    #[error("coupling <B phi_{j}, phi_{k}> vanishes")]
    DegenerateCoupling { j: usize, k: usize },

    #[error("quadrature for entry ({j}, {k}) did not reach {tol:e} (estimate {estimate:e})")]
    QuadratureFailure {
        j: usize,
        k: usize,
        tol: f64,
        estimate: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("truncation {trunc} too small: tail estimate requires index >= {required}")]
    TruncationTooSmall { trunc: usize, required: usize },

    #[error("requested {requested} controlled modes exceeds the cap of {cap}")]
    ModeCapExceeded { requested: usize, cap: usize },

    #[error("moment synthesis failed: max scaled residual {max_residual:e}")]
    SynthesisFailure { max_residual: f64, residuals: Vec<f64> },

    #[error("time {t} outside control window [{start}, {end}]")]
    OutOfWindow { t: f64, start: f64, end: f64 },

    #[error("step size underflow at t = {t} (dt = {dt:e})")]
    Stiffness { t: f64, dt: f64 },

    #[error("step limit {steps} reached at t = {t}")]
    StepLimit { t: f64, steps: usize },

    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("free-decay phase failed: ln|v(t_R)| = {log_norm} is not below ln(sqrt 2 r1) = {log_threshold}")]
    DecayPhase { log_norm: f64, log_threshold: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
