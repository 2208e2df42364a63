use thiserror::Error;

/// Errors produced by the numeric, estimation and simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method did not reach its tolerance.
    #[error("{what} did not converge within {iterations} iterations")]
    Convergence {
        what: &'static str,
        iterations: usize,
    },

    /// Malformed record in a rank-count table.
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("input contains no records")]
    EmptyInput,

    /// Parameters are individually valid but admit no usable configuration.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
