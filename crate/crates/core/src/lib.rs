//! Solvers for the graph inspection problem: find a minimum-weight closed
//! walk from a start vertex that collects at least a given number of colors.

pub mod bounds;
pub mod config;
pub mod dp;
pub mod error;
pub mod gen;
pub mod graph;
pub mod ilp;
pub mod io;
pub mod merge;
pub mod oracle;
pub mod pipeline;
pub mod reduction;
pub mod results;

pub use error::{Error, Result};
