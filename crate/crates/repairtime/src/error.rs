use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Unified error type for model construction, numerical evaluation, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// No failures were observed before termination (d = 0), so the
    /// posterior does not normalize and nothing can be inferred.
    #[error("improper posterior: the censored sample contains no failures (d = 0)")]
    ImproperPosterior,

    /// An adaptive integration did not reach the requested tolerance.
    #[error("{context}: quadrature did not converge (estimate {estimate:.6e}, error bound {error_bound:.3e})")]
    QuadratureFailure {
        context: &'static str,
        estimate: f64,
        error_bound: f64,
    },

    /// A root or maximum could not be bracketed.
    #[error("bracketing failed: {0}")]
    Bracket(String),

    /// An iterative solver stopped before meeting its tolerance.
    #[error("{what} did not converge: residual {residual:.3e}")]
    NonConvergence { what: String, residual: f64 },

    /// A structural assumption the method relies on failed a runtime check.
    #[error("diagnostic: {0}")]
    Diagnostic(String),

    /// A data file could not be parsed.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A data file contained no usable values.
    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// A report could not be serialized.
    #[error("serialization error: {0}")]
    Serialization(#[from] serde_json::Error),
}
