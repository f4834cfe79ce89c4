use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series too short: {0}")]
    Length(String),

    #[error("wrong number of values: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("design matrix is rank deficient: {0}")]
    Rank(String),

    #[error("optimizer failed to converge: {0}")]
    Convergence(String),

    #[error("time index {index} outside [{first}, {last}]")]
    Index { index: i64, first: i64, last: i64 },

    #[error("scan window is empty: {0}")]
    EmptyScan(String),

    #[error("non-stationary AR polynomial; roots {roots:?} not outside the unit circle")]
    Stability { roots: Vec<(f64, f64)> },

    #[error("invalid configuration: {0}")]
    Config(String),
}
