use std::fmt;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid filtration: {0}")]
    InvalidFiltration(#[from] crate::simplicial::FiltrationViolation),

    #[error("matrix is not reduced: columns {first} and {second} share low {low}")]
    NotReduced {
        first: usize,
        second: usize,
        low: usize,
    },

    #[error("{op}: input {value} outside its domain {domain}")]
    Domain {
        op: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("infeasible parameters: {0}")]
    Infeasible(Infeasibility),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("malformed matrix: {0}")]
    Matrix(String),

    #[error("unknown example {0:?}")]
    UnknownExample(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Whether the error stems from reading, parsing or writing files
    /// (CLI exit code 2).
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io(_)
                | Error::Json(_)
                | Error::Csv(_)
                | Error::Matrix(_)
                | Error::InvalidFiltration(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Names the bound that collapsed when a parameter search has no finite answer.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Infeasibility {
    pub bound: &'static str,
    pub detail: String,
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bound collapsed: {}", self.bound, self.detail)
    }
}
