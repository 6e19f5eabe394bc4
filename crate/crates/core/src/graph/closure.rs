use std::cmp::Reverse;
use std::collections::BinaryHeap;

use ordered_float::OrderedFloat;
use rayon::prelude::*;

use super::instance::{InspectionInstance, VertexId};
use crate::error::{Error, Result};

const NO_PRED: u32 = u32::MAX;

/// All-pairs shortest-path distances with one predecessor tree per source.
///
/// Rows are computed by independent Dijkstra runs (in parallel on the
/// current rayon pool). `dist` is symmetrized from the smaller source id so
/// that `dist(u, v) == dist(v, u)` bit for bit.
#[derive(Clone, Debug)]
pub struct MetricClosure {
    n: usize,
    dist: Vec<f64>,
    pred: Vec<u32>,
}

impl MetricClosure {
    pub fn new(inst: &InspectionInstance) -> Result<Self> {
        if !inst.is_connected() {
            return Err(Error::DisconnectedGraph);
        }
        let n = inst.vertex_count();
        let rows: Vec<(Vec<f64>, Vec<u32>)> =
            (0..n).into_par_iter().map(|s| dijkstra(inst, s)).collect();
        let mut dist = Vec::with_capacity(n * n);
        let mut pred = Vec::with_capacity(n * n);
        for (d, p) in rows {
            dist.extend(d);
            pred.extend(p);
        }
        for u in 0..n {
            for v in (u + 1)..n {
                dist[v * n + u] = dist[u * n + v];
            }
        }
        Ok(MetricClosure { n, dist, pred })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dist(&self, u: VertexId, v: VertexId) -> f64 {
        self.dist[u * self.n + v]
    }

    pub fn row(&self, u: VertexId) -> &[f64] {
        &self.dist[u * self.n..(u + 1) * self.n]
    }

    /// Explicit minimum-weight path from `u` to `v`, both endpoints included.
    pub fn path(&self, u: VertexId, v: VertexId) -> Vec<VertexId> {
        let base = u * self.n;
        let mut out = vec![v];
        let mut cur = v;
        while cur != u {
            let p = self.pred[base + cur];
            debug_assert_ne!(p, NO_PRED);
            cur = p as usize;
            out.push(cur);
        }
        out.reverse();
        out
    }
}

/// Single-source shortest paths. Among equal tentative distances the
/// smaller vertex id is settled first, and equal-length predecessors prefer
/// the smaller id.
fn dijkstra(inst: &InspectionInstance, source: VertexId) -> (Vec<f64>, Vec<u32>) {
    let n = inst.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NO_PRED; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    pred[source] = source as u32;
    heap.push(Reverse((OrderedFloat(0.0), source)));
    while let Some(Reverse((OrderedFloat(d), v))) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for &(w, weight) in inst.neighbors(v) {
            if done[w] {
                continue;
            }
            let nd = d + weight;
            if nd < dist[w] || (nd == dist[w] && (v as u32) < pred[w]) {
                let improved = nd < dist[w];
                dist[w] = nd;
                pred[w] = v as u32;
                if improved {
                    heap.push(Reverse((OrderedFloat(nd), w)));
                }
            }
        }
    }
    (dist, pred)
}
