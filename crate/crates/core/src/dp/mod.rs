//! Exact solver: dynamic program over (vertex, collected color subset) on the
//! metric closure, plus the fixed-order and bucketed variants.

mod ordered;
mod table;

pub use ordered::{solve_bucketed, solve_fixed_order};
pub use table::DpTable;

use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::{expand_closure_walk, Color, InspectionInstance, MetricClosure, VertexId, Walk};

/// Largest working color set the bitmask table accepts by default.
///
/// Memory grows as `2^k * n'` (n' = vertices carrying a working color), so
/// `k <= 20` is the practical ceiling for graphs with about 2000 vertices.
pub const DEFAULT_COLOR_CAP: usize = 25;

#[derive(Clone, Debug)]
pub struct DpOptions {
    pub color_cap: usize,
    /// Abort with [`Error::Timeout`] once this instant has passed.
    pub deadline: Option<Instant>,
    /// Size of a dedicated worker pool for the table fill; `None` uses the
    /// ambient rayon pool.
    pub workers: Option<usize>,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions {
            color_cap: DEFAULT_COLOR_CAP,
            deadline: None,
            workers: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DpSolution {
    pub walk: Walk,
    /// Optimum over the metric closure (sum of closure distances).
    pub optimum: f64,
    /// Closed sequence over the metric closure: start, collection stops, start.
    pub sequence: Vec<VertexId>,
}

/// Minimum-weight closed walk from the start collecting at least `quota`
/// colors. The instance must be normalized.
pub fn solve_dp(inst: &InspectionInstance, mc: &MetricClosure) -> Result<Walk> {
    solve_dp_with(inst, mc, &DpOptions::default()).map(|s| s.walk)
}

pub fn solve_dp_with(
    inst: &InspectionInstance,
    mc: &MetricClosure,
    opts: &DpOptions,
) -> Result<DpSolution> {
    inst.require_normalized()?;
    let s = inst.start();
    let t = inst.quota();
    if t == 0 {
        return Ok(DpSolution {
            walk: Walk::trivial(inst, s),
            optimum: 0.0,
            sequence: vec![s],
        });
    }
    let table = match opts.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            pool.install(|| DpTable::build(inst, mc, t, opts))?
        }
        None => DpTable::build(inst, mc, t, opts)?,
    };
    let (optimum, sequence) = table.best_closed_sequence(t)?;
    let walk = expand_closure_walk(inst, &sequence, mc)?;
    Ok(DpSolution {
        walk,
        optimum,
        sequence,
    })
}

/// Colors carried by vertices other than the start, sorted; bit `i` of a DP
/// subset mask stands for `working_colors[i]`.
pub fn working_colors(inst: &InspectionInstance) -> Vec<Color> {
    inst.collectible_colors()
}
