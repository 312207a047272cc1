use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    #[error("invalid `{field}`: {reason}")]
    Domain { field: &'static str, reason: String },

    /// A closed-form expression was evaluated at its (removable) singular point.
    #[error("closed form is singular here: {0}")]
    Singular(String),

    /// Spin-orbit coupling is absent, so the requested quantity is undefined.
    #[error("no spin-orbit coupling; spin-flip undefined")]
    NoSpinOrbit,

    /// The grid integrator cannot be trusted at the requested resolution.
    #[error("oracle convergence failure: {0}")]
    Convergence(String),

    /// The spatial grid cannot represent the requested state.
    #[error("grid cannot resolve the state: {0}")]
    Grid(String),

    /// Scenario or table input could not be interpreted.
    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            field,
            reason: reason.into(),
        }
    }
}
