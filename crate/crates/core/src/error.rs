use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no protected subspace: E_mx and E_my are both zero")]
    NoProtectedSubspace,

    #[error("singular configuration: {0}")]
    SingularConfiguration(String),

    #[error("step size {dt:e} s too coarse, must be at most {max_dt:e} s")]
    StepSize { dt: f64, max_dt: f64 },

    #[error("insufficient statistics: need at least {needed} trajectories, got {got}")]
    InsufficientStatistics { needed: usize, got: usize },

    #[error("coherence did not decay below 1/e within {duration:e} s")]
    InsufficientDuration { duration: f64 },

    #[error("degenerate drive: encoded splittings of both qubits are equal")]
    DegenerateDrive,

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
