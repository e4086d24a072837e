use thiserror::Error;

/// Error type shared by the numerical modules.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("invalid modulus parameters: {0}")]
    InvalidModulus(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("quadrature did not converge: {context} (partial value {partial:.6e}, error estimate {err:.3e})")]
    QuadratureNonConvergence {
        context: String,
        partial: f64,
        err: f64,
    },
    #[error("divergent integral: {0}")]
    Divergence(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("time step rejected: {reason}; suggested dt = {suggested:.6e}")]
    StepRejected { reason: String, suggested: f64 },
    #[error("solution diverged (NaN) at t = {t:.6e}")]
    SolverDiverged { t: f64 },
    #[error("shock inside characteristic step: h*max(dθ/dx) = {stretch:.4} >= 1")]
    ShockInStep { stretch: f64 },
    #[error("construction error: {0}")]
    Construction(String),
    #[error("sweep exhausted: {0}")]
    SweepExhausted(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
