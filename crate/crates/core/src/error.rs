use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Hilbert space: {0}")]
    InvalidSpace(String),

    #[error("unknown mode label `{0}`")]
    UnknownMode(String),

    #[error("operands act on different Hilbert spaces ({left} vs {right})")]
    SpaceMismatch { left: String, right: String },

    #[error("operator is not Hermitian (relative deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("steady-state system is singular: {0}")]
    Singular(String),

    #[error("steady state is not unique: {0}")]
    DegenerateNullSpace(String),

    #[error("steady-state residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error(
        "iterative solver did not converge after {iterations} iterations (residual {residual:.3e})"
    )]
    NotConverged { iterations: usize, residual: f64 },

    #[error(
        "step size underflow at t = {t:.6e} (h = {h:.3e}); the system is too stiff for \
         explicit integration, use the steady-state solver instead"
    )]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error(
        "time integration stopped after {steps} steps at t = {t:.6e}; the system is too \
         stiff for explicit integration, use the steady-state solver instead"
    )]
    TooManySteps { steps: usize, t: f64 },

    #[error("Wigner grid: {0}")]
    Grid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
