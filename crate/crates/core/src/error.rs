use thiserror::Error;

/// Errors produced by graph loading and the clustering / diagnostic routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: nonpositive weight {weight}")]
    NonPositiveWeight { line: usize, weight: f64 },

    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },

    #[error("vertex {0} is isolated")]
    IsolatedVertex(usize),

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("degenerate vertex set: {0}")]
    DegenerateSet(&'static str),

    #[error("vertex sets overlap")]
    OverlappingSets,

    #[error("set is not contained in its superset")]
    NotSubset,

    #[error("graph is disconnected")]
    Disconnected,

    #[error("walk cannot leave the domain; Green function diverges")]
    DivergentGreen,

    #[error("block has an empty exterior boundary")]
    EmptyBoundary,

    #[error("enumeration needs 2^{bits} rules, cap is 2^{cap}")]
    EnumerationCap { bits: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
