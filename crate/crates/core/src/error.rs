use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    /// An input object (matrix, covariance, parameter set) failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("tau = {tau} is outside the grid range [0, {tau_max}]")]
    OutOfRange { tau: f64, tau_max: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("invalid value for `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("config line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line front-end.
    ///
    /// `1` for invalid input, `2` for numeric failures, `3` for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::InvalidGrid(_)
            | Error::Validation(_)
            | Error::OutOfRange { .. }
            | Error::Config { .. }
            | Error::Parse { .. } => 1,
            Error::NonConvergence(_) | Error::Numeric(_) => 2,
            Error::Io(_) => 3,
            Error::Csv(e) => match e.kind() {
                csv::ErrorKind::Io(_) => 3,
                _ => 2,
            },
        }
    }

    pub(crate) fn config(key: &str, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.to_string(),
            reason: reason.into(),
        }
    }
}
