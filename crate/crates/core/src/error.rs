use thiserror::Error;

/// Errors raised by the analytic routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("{func}: domain error: {msg}")]
    Domain { func: &'static str, msg: String },

    /// Structurally invalid input (empty lists, unsorted grids, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A numerical integration did not reach its error target.
    #[error("quadrature failed: {0}")]
    Quadrature(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            func,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
