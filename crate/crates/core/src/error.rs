use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoronaError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("inexact division in {what}: {numerator} / {denominator}")]
    InexactDivision {
        what: &'static str,
        numerator: u128,
        denominator: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("undefined value: {0}")]
    Undefined(String),

    #[error("argument out of domain: {0}")]
    OutOfDomain(String),

    #[error("size guard exceeded: {what} is {size}, limit {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CoronaError {
    /// True for errors caused by the caller's request (bad parameters or a
    /// size guard) rather than by a failed computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            CoronaError::InvalidParams(_)
                | CoronaError::TooLarge { .. }
                | CoronaError::OutOfDomain(_)
                | CoronaError::Precondition(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, CoronaError>;
