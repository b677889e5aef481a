//! Error types shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid bundle data: {0}")]
    InvalidBundle(String),

    #[error("metric is not positive definite at node {node} (min eigenvalue {eigmin:.3e})")]
    NonPositiveMetric { node: usize, eigmin: f64 },

    #[error("weight function is not positive: v({mu:.6}) = {value:.6e}")]
    NonPositiveWeight { mu: f64, value: f64 },

    #[error("Fourier round-trip error {err:.3e} exceeds tolerance {tol:.3e}")]
    InversionMismatch { err: f64, tol: f64 },

    #[error("backends disagree on {what}: gap {gap:.3e} exceeds tolerance {tol:.3e}")]
    BackendMismatch { what: String, gap: f64, tol: f64 },

    #[error("degenerate denominator: n = rk(F) = {n} in the non-liftable case")]
    DegenerateDenominator { n: usize },

    #[error("twist k = {k} out of range for summand of degree {degree}")]
    NegativeTwist { k: i64, degree: i64 },

    #[error("asymptotic fit diverged: {0}")]
    FitDiverged(String),

    #[error("ordering not stable over the tail of the k-range")]
    Inconclusive,

    #[error("right-hand side has nonzero mean {mean:.3e}; the weighted Laplacian is not solvable")]
    NotSolvable { mean: f64 },

    #[error("endomorphism is not positive at node {node} (min eigenvalue {eigmin:.3e})")]
    NonPositiveEndomorphism { node: usize, eigmin: f64 },

    #[error("Newton iteration diverged at epsilon = {epsilon:.3e} (residual {residual:.3e})")]
    NewtonDiverged { epsilon: f64, residual: f64 },

    #[error("weight deformation stuck at t = {t:.6}")]
    DeformationStuck { t: f64 },

    #[error("weight function fails the Hessian precondition (max margin {margin:.3e})")]
    PreconditionWeight { margin: f64 },

    #[error("operation requires the exponential weight family, got {family}")]
    WrongFamily { family: String },

    #[error("empty series")]
    EmptySeries,

    #[error("invalid weight specification: {0}")]
    InvalidWeight(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
