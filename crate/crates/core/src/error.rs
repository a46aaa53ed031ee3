use thiserror::Error;

/// Errors raised by evaluation, parsing and checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain mismatch: function on {found}, space on {expected}")]
    DomainMismatch { expected: String, found: String },
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("rearrangement is unbounded at 0 and no exact representation exists")]
    UnboundedRearrangement,
    #[error("function is not integrable near 0")]
    NotLocallyIntegrable,
    #[error("limit does not exist: {0}")]
    NoLimit(String),
    #[error("space not covered by the rule table: {0}")]
    Unclassifiable(String),
    #[error("space does not embed into L-infinity (fundamental function vanishes at 0)")]
    NotEmbedded,
    #[error("ideal of order continuous elements is not trivial")]
    NotTrivialIdeal,
    #[error("no convergence after {depth} refinements; last iterates {partial:?}")]
    NoConvergence { depth: u32, partial: Vec<f64> },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error in `{field}` at line {line}, column {column}: {message}")]
    Parse {
        field: String,
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    /// Stable machine readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DomainMismatch { .. } => "domain_mismatch",
            Error::InvalidFunction(_) => "invalid_function",
            Error::InvalidGenerator(_) => "invalid_generator",
            Error::InvalidSpace(_) => "invalid_space",
            Error::UnboundedRearrangement => "unbounded_rearrangement",
            Error::NotLocallyIntegrable => "not_locally_integrable",
            Error::NoLimit(_) => "no_limit",
            Error::Unclassifiable(_) => "unclassifiable",
            Error::NotEmbedded => "not_embedded",
            Error::NotTrivialIdeal => "not_trivial_ideal",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Unsupported(_) => "unsupported",
            Error::Precondition(_) => "precondition",
            Error::Parse { .. } => "parse_error",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
