use thiserror::Error;

/// Errors raised by the library.
///
/// Variants follow the failure classes of the operations: bad inputs
/// (`Domain`, `Argument`), unmet mathematical preconditions, enumeration
/// budgets, and construction or estimation failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("enumeration budget exceeded: about {estimate:.0} items requested, budget is {budget}")]
    Budget { estimate: f64, budget: u64 },
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("estimation failed: {0}")]
    Estimation(String),
    #[error("accumulation set of the rate vector is unbounded: {0}")]
    UnboundedRates(String),
    #[error("conjugation failed: {0}")]
    Conjugation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
