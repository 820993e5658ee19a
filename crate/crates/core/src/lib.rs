//! Sparse-cut clustering of weighted graphs.

// `!(x > 0.0)` style checks deliberately reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Dense numeric kernels read more clearly with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod cluster;
pub mod entropy;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod oracle;
pub mod rng;
pub mod solar;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{TransitionKernel, VertexSet, WeightedGraph, UNREACHABLE};
