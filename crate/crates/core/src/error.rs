use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not symmetric: max |A_ij - A_ji| = {max_deviation:e} at ({row}, {col}) exceeds tolerance {tolerance:e}")]
    Asymmetric {
        max_deviation: f64,
        row: usize,
        col: usize,
        tolerance: f64,
    },

    /// Power iteration did not reach the requested residual.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    ConvergenceFailure {
        iterations: usize,
        residual: f64,
        last_iterate: Vec<f64>,
    },

    /// `A x_{t-1}` vanished, so the next iterate cannot be normalized.
    #[error("degenerate iterate at iteration {iteration}: A x is the zero vector")]
    DegenerateIterate { iteration: usize },

    #[error("loadings are rank deficient (Gram determinant {determinant:e})")]
    DegenerateLoadings { determinant: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("enumeration budget exceeded: {required} subsets > budget {budget}{hint}")]
    /// `hint` is empty or starts with "; ".
    BudgetExceeded {
        required: u128,
        budget: u128,
        hint: &'static str,
    },

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("graph has no edges")]
    NoEdges,

    #[error("component {index}: {source}")]
    Component {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag, used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Asymmetric { .. } => "asymmetric-matrix",
            Error::ConvergenceFailure { .. } => "convergence-failure",
            Error::DegenerateIterate { .. } => "degenerate-iterate",
            Error::DegenerateLoadings { .. } => "degenerate-loadings",
            Error::DegenerateInput(_) => "degenerate-input",
            Error::BudgetExceeded { .. } => "budget-exceeded",
            Error::PreconditionViolation(_) => "precondition-violation",
            Error::NoEdges => "no-edge",
            Error::Component { source, .. } => source.kind(),
            Error::Parse { .. } => "parse-error",
            Error::Io { .. } => "io-error",
        }
    }
}
