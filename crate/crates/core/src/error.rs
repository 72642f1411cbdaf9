use thiserror::Error;

/// Errors raised by the pricing engine and its numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the function or model.
    #[error("{name} = {value} is outside the admissible domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// An iterative or series computation hit its iteration cap.
    #[error("{routine} did not converge within {iterations} iterations")]
    NonConvergence { routine: &'static str, iterations: usize },

    /// A Schroder argument blew past the representable range.
    #[error("{name} = {value:e} overflows (degenerate sigma or maturity)")]
    Overflow { name: &'static str, value: f64 },

    /// The Black-Scholes-family effective variance vanished.
    #[error("effective variance is zero")]
    DegenerateVariance,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain { name, value, reason }
}
