use thiserror::Error;

/// Errors raised by the estimation, clustering and testing routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty population")]
    EmptyPopulation,
    #[error("invalid observation: {0}")]
    InvalidObservation(String),
    #[error("degenerate support: a population has no positive observed time")]
    DegenerateSupport,
    #[error("grid needs at least 2 points, got {0}")]
    GridTooSmall(usize),
    #[error("no events to compare")]
    NoEvents,
    #[error("at least {needed} populations required, got {got}")]
    TooFewPopulations { needed: usize, got: usize },
    #[error("invalid p-value: {0}")]
    InvalidPValue(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cannot form {k} clusters from {j} curves")]
    TooManyClusters { k: usize, j: usize },
    #[error("curves are not evaluated on the same grid")]
    GridMismatch,
    #[error("empty member set")]
    EmptyCluster,
    #[error("invalid resample count")]
    InvalidResampleCount,
    #[error("invalid distribution parameter: {0}")]
    InvalidParameter(String),
    #[error("no records")]
    NoRecords,
    #[error("column not found: {0}")]
    ColumnNotFound(String),
    #[error("row {row}: {message}")]
    BadRow { row: usize, message: String },
    #[error("{count} row(s) with missing values (first at row {first_row})")]
    MissingValues { count: usize, first_row: usize },
    #[error("io error: {0}")]
    Io(String),
}

/// Coarse classification used by the command-line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Usage,
    Data,
    Numerical,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidArgument(_)
            | Error::GridTooSmall(_)
            | Error::InvalidResampleCount
            | Error::TooManyClusters { .. }
            | Error::InvalidParameter(_) => ErrorCategory::Usage,
            Error::NoEvents
            | Error::DegenerateSupport
            | Error::InvalidPValue(_)
            | Error::GridMismatch
            | Error::EmptyCluster => ErrorCategory::Numerical,
            _ => ErrorCategory::Data,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
