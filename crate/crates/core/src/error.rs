use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    Validation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("not enough moments: need m_0..m_{needed}, have m_0..m_{available}")]
    InsufficientMoments { needed: usize, available: usize },

    #[error("moment sequence is not feasible: minimum Hankel eigenvalue {min_eigenvalue:e}")]
    InfeasibleMoments { min_eigenvalue: f64 },

    #[error("census consistency check failed: {0}")]
    Consistency(String),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("matrix is not symmetric (skew {0:e})")]
    NotSymmetric(f64),

    #[error("graph has {n} nodes, above the dense eigensolver cap of {cap}; use the moment-based bounds instead")]
    TooLarge { n: usize, cap: usize },

    #[error("bisection failed: {0}")]
    Bisection(String),

    #[error("linear program infeasible at this discretization (residual {0:e}); refine the grid")]
    LpInfeasible(f64),

    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
