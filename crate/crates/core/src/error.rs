use thiserror::Error;

/// Error type shared by all computational modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("numerical blow-up at t = {time}: state {state}")]
    Blowup { time: f64, state: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("distribution error: {0}")]
    Distribution(String),

    #[error("degenerate policy: {0}")]
    DegeneratePolicy(String),

    #[error("intervention chattering: more than {cap} interventions before t = {time}")]
    Chattering { cap: usize, time: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }

    pub(crate) fn distribution(msg: impl Into<String>) -> Self {
        Error::Distribution(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parameter(_) => 2,
            Error::Hypothesis(_) => 4,
            Error::Blowup { .. }
            | Error::Numerical(_)
            | Error::Distribution(_)
            | Error::DegeneratePolicy(_)
            | Error::Chattering { .. } => 3,
        }
    }
}
