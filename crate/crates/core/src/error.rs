use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Variants split into two families: input problems (`Domain`, `Validation`,
/// `NonCertifiable`) and numerical failures (`Quadrature`, `NoBracket`,
/// `NotConverged`). [`Error::is_numerical`] tells them apart, which the CLI
/// uses to pick an exit code.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("non-certifiable warp on this window: {0}")]
    NonCertifiable(String),

    #[error(
        "quadrature did not converge on [{lo}, {hi}]: achieved error {achieved:e}, target {target:e}"
    )]
    Quadrature {
        lo: f64,
        hi: f64,
        achieved: f64,
        target: f64,
    },

    #[error("no sign change found while scanning [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NotConverged { what: String, iterations: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. } | Error::NoBracket { .. } | Error::NotConverged { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
