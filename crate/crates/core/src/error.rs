use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("infeasible regular graph: n={n}, degree={degree} ({reason})")]
    InfeasibleDegree {
        n: usize,
        degree: usize,
        reason: &'static str,
    },
    #[error("no simple graph found after {attempts} pairing attempts")]
    GenerationFailed { attempts: usize },
    #[error("instance too large for {what}: {size} > {max}")]
    TooLarge {
        what: &'static str,
        size: usize,
        max: usize,
    },
    #[error("improper coloring: edge ({0}, {1}) has equal colors")]
    ImproperColoring(usize, usize),
    #[error("encoding error: {0}")]
    Encoding(String),
    #[error("width mismatch: expected {expected} qubits, found {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("{what} did not converge (residual {residual:e})")]
    NotConverged { what: &'static str, residual: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
