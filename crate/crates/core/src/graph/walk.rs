use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::closure::MetricClosure;
use super::instance::{Color, InspectionInstance, VertexId};
use crate::error::{Error, Result};

/// Relative tolerance for comparing a stored walk weight with its recomputation.
pub const WEIGHT_RTOL: f64 = 1e-9;

/// A walk in the instance graph with its weight and collected colors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Walk {
    pub vertices: Vec<VertexId>,
    pub weight: f64,
    pub collected: Vec<Color>,
}

impl Walk {
    /// The empty closed walk that never leaves `start`.
    pub fn trivial(inst: &InspectionInstance, start: VertexId) -> Self {
        Walk {
            vertices: vec![start],
            weight: 0.0,
            collected: inst.colors(start).to_vec(),
        }
    }

    /// Builds a walk from consecutive adjacent vertices, summing edge weights.
    pub fn from_vertices(inst: &InspectionInstance, vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidWalk("empty vertex sequence".into()));
        }
        let n = inst.vertex_count();
        let mut weight = 0.0;
        for pair in vertices.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if a >= n || b >= n {
                return Err(Error::InvalidId {
                    id: a.max(b),
                    bound: n,
                });
            }
            weight += inst.edge_weight(a, b).ok_or_else(|| {
                Error::InvalidWalk(format!("vertices {a} and {b} are not adjacent"))
            })?;
        }
        if vertices[0] >= n {
            return Err(Error::InvalidId {
                id: vertices[0],
                bound: n,
            });
        }
        let collected = collect_colors(inst, &vertices);
        Ok(Walk {
            vertices,
            weight,
            collected,
        })
    }

    pub fn is_closed(&self) -> bool {
        self.vertices.first() == self.vertices.last()
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    /// Checks closedness at `start`, adjacency, stored weight and colors.
    pub fn validate(&self, inst: &InspectionInstance, start: VertexId) -> Result<()> {
        if self.vertices.first() != Some(&start) || self.vertices.last() != Some(&start) {
            return Err(Error::InvalidWalk(format!("walk is not closed at {start}")));
        }
        let fresh = Walk::from_vertices(inst, self.vertices.clone())?;
        if !weights_match(fresh.weight, self.weight) {
            return Err(Error::InvalidWalk(format!(
                "stored weight {} differs from recomputed {}",
                self.weight, fresh.weight
            )));
        }
        if fresh.collected != self.collected {
            return Err(Error::InvalidWalk("collected colors do not match".into()));
        }
        Ok(())
    }

    /// Colors collected, as a fraction of all colors of `inst`.
    pub fn coverage(&self, inst: &InspectionInstance) -> f64 {
        if inst.num_colors() == 0 {
            1.0
        } else {
            self.collected.len() as f64 / inst.num_colors() as f64
        }
    }

    /// Appends a closed walk sharing this walk's endpoint.
    pub fn concat(&mut self, other: &Walk) {
        debug_assert_eq!(self.vertices.last(), other.vertices.first());
        self.vertices.extend_from_slice(&other.vertices[1..]);
        self.weight += other.weight;
        let merged: BTreeSet<Color> = self
            .collected
            .iter()
            .chain(other.collected.iter())
            .copied()
            .collect();
        self.collected = merged.into_iter().collect();
    }
}

pub(crate) fn collect_colors(inst: &InspectionInstance, vertices: &[VertexId]) -> Vec<Color> {
    let set: BTreeSet<Color> = vertices
        .iter()
        .flat_map(|&v| inst.colors(v).iter().copied())
        .collect();
    set.into_iter().collect()
}

pub fn weights_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= WEIGHT_RTOL * a.abs().max(b.abs()).max(1.0)
}

/// Realizes a closed sequence over the metric closure as a walk in the
/// original graph by splicing in shortest paths between consecutive entries.
pub fn expand_closure_walk(
    inst: &InspectionInstance,
    seq: &[VertexId],
    mc: &MetricClosure,
) -> Result<Walk> {
    let Some(&first) = seq.first() else {
        return Err(Error::InvalidWalk("empty sequence".into()));
    };
    let n = inst.vertex_count();
    if let Some(&bad) = seq.iter().find(|&&v| v >= n) {
        return Err(Error::InvalidId { id: bad, bound: n });
    }
    let mut vertices = vec![first];
    for pair in seq.windows(2) {
        if pair[0] == pair[1] {
            continue;
        }
        let path = mc.path(pair[0], pair[1]);
        vertices.extend_from_slice(&path[1..]);
    }
    Walk::from_vertices(inst, vertices)
}
