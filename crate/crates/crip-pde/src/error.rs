use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("linear solver did not converge: residual {residual:.3e} after {iterations} iterations (tolerance {tolerance:.3e})")]
    SolverNonConvergence {
        residual: f64,
        iterations: usize,
        tolerance: f64,
    },

    #[error("degenerate steady state: Gamma_SL = 0 with zero-flux boundaries (P -> 1 wherever u > 0)")]
    DegenerateSteadyState,

    #[error(transparent)]
    Core(#[from] spinlab_core::Error),
}

impl Error {
    pub fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}
