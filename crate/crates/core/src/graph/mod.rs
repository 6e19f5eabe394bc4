//! Instance, walk and multigraph types plus the shared graph algorithms.

mod closure;
mod instance;
mod mst;
mod multigraph;
mod walk;

pub use closure::MetricClosure;
pub use instance::{Color, Edge, InspectionInstance, Normalized, VertexId};
pub use mst::{kruskal, minimum_spanning_tree};
pub use multigraph::{MultiEdge, WalkMultigraph};
pub use walk::{expand_closure_walk, weights_match, Walk, WEIGHT_RTOL};
