use thiserror::Error;

/// Errors raised by the solvers, generators and parsers in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidSpec(String),

    #[error("invalid chord diagram: {0}")]
    InvalidDiagram(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("graph has {leaves} degree-1 vertices and auto-prune is disabled")]
    NotPruned { leaves: usize },

    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("spectral radius {rho} at h = {h} is not 1 within tolerance")]
    NotAtEntropy { h: f64, rho: f64 },

    #[error("bouquet needs at least two circles, got {0}")]
    TooFewCircles(usize),

    #[error("two-vertex graph needs at least three edges, got {0}")]
    TooFewEdges(usize),

    #[error("arc {0} has zero length")]
    DegenerateArc(usize),

    #[error("orthospectrum is empty")]
    EmptySpectrum,

    #[error("invalid insertion: {0}")]
    InvalidInsertion(String),

    #[error("tree expansion exceeded the node cap of {cap}")]
    BudgetExceeded { cap: u64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
