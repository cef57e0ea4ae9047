use thiserror::Error;

/// Errors raised by the numerical routines and the command-line front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate disc: the map is constant and equal to the target point")]
    DegenerateDisc,
    #[error("no admissible disc: {0}")]
    NoAdmissibleDisc(String),
    #[error("ladder exits the domain at lambda = {0}")]
    LadderExitsDomain(f64),
    #[error("degenerate basis: every element has L1 norm below {0}")]
    DegenerateBasis(f64),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::DomainViolation(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
