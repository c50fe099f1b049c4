use thiserror::Error;

/// Errors raised by the roadmap algorithms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid map: {0}")]
    InvalidMap(&'static str),
    #[error("free space too sparse: {0} consecutive samples rejected")]
    FreeSpaceTooSparse(usize),
    #[error("triangulation needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("duplicate point at indices {0} and {1}")]
    DuplicatePoint(usize, usize),
    #[error("no edge between vertices {0} and {1}")]
    MissingEdge(usize, usize),
    #[error("no collision-free connection from the {0} configuration to the roadmap")]
    NoConnection(&'static str),
    #[error("goal unreachable from start")]
    Unreachable,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite gradient entry at index {0}")]
    NonFiniteGradient(usize),
    #[error("all {0} queries in the batch were infeasible")]
    AllQueriesInfeasible(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("graph has fewer than 2 usable vertices")]
    DegenerateGraph,
}

pub type Result<T> = core::result::Result<T, Error>;
