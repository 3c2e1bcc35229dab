use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The rotation lies on (or numerically at) the cut locus, `trace(R) <= -1`.
    #[error("rotation angle too close to pi for a unique logarithm (trace = {trace})")]
    AngleNearPi { trace: f64 },

    #[error("Jacobian singular: rotation angle {angle} rad is not below {limit} rad")]
    JacobianSingular { angle: f64, limit: f64 },

    #[error("covariance is not positive semi-definite (min eigenvalue {min_eigenvalue:e})")]
    CovarianceNotPsd { min_eigenvalue: f64 },

    #[error("Cholesky factorization failed: the augmented covariance is indefinite")]
    CholeskyFailure,

    #[error("Karcher mean did not converge after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NoConvergence {
        iterations: usize,
        gradient_norm: f64,
    },

    #[error("logarithm of the innovation T^-1 Z is undefined (trace = {trace})")]
    InnovationLogFailure { trace: f64 },

    #[error("innovation covariance P_zz is singular")]
    LinearSolveFailure,

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid rotation matrix: {0}")]
    InvalidRotation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
