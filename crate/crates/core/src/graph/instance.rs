use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type Color = u32;

/// Undirected weighted edge, stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: f64,
}

impl Edge {
    pub fn new(a: VertexId, b: VertexId, weight: f64) -> Self {
        let (u, v) = if a <= b { (a, b) } else { (b, a) };
        Edge { u, v, weight }
    }

    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// An edge-weighted graph whose vertices carry sets of colors (points of
/// interest), plus the start vertex and the number of colors to collect.
///
/// Parallel input edges are collapsed to the lightest one. Vertex color sets
/// are kept sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq)]
pub struct InspectionInstance {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(VertexId, f64)>>,
    colors: Vec<Vec<Color>>,
    num_colors: usize,
    start: VertexId,
    quota: usize,
    positions: Option<Vec<[f64; 3]>>,
    collapsed_edges: usize,
}

impl InspectionInstance {
    /// Validates and assembles an instance.
    ///
    /// `colors` may be shorter than `n`; missing vertices have no colors.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = Edge>,
        mut colors: Vec<Vec<Color>>,
        num_colors: usize,
        start: VertexId,
        quota: usize,
        positions: Option<Vec<[f64; 3]>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("instance has no vertices".into()));
        }
        if start >= n {
            return Err(Error::InvalidId {
                id: start,
                bound: n,
            });
        }
        if quota > num_colors {
            return Err(Error::QuotaExceedsColors {
                quota,
                colors: num_colors,
            });
        }
        if colors.len() > n {
            return Err(Error::InvalidInstance(format!(
                "{} color lists for {n} vertices",
                colors.len()
            )));
        }
        colors.resize(n, Vec::new());
        for set in colors.iter_mut() {
            set.sort_unstable();
            set.dedup();
            if let Some(&c) = set.last() {
                if c as usize >= num_colors {
                    return Err(Error::InvalidId {
                        id: c as usize,
                        bound: num_colors,
                    });
                }
            }
        }
        if let Some(p) = &positions {
            if p.len() != num_colors {
                return Err(Error::InvalidInstance(format!(
                    "{} color positions for {num_colors} colors",
                    p.len()
                )));
            }
        }

        let mut lightest: BTreeMap<(VertexId, VertexId), f64> = BTreeMap::new();
        let mut seen = 0usize;
        for e in edges {
            seen += 1;
            if e.u >= n || e.v >= n {
                return Err(Error::InvalidId {
                    id: e.u.max(e.v),
                    bound: n,
                });
            }
            if e.u == e.v {
                return Err(Error::InvalidInstance(format!(
                    "self-loop at vertex {}",
                    e.u
                )));
            }
            if !e.weight.is_finite() || e.weight < 0.0 {
                return Err(Error::NegativeWeight(e.weight));
            }
            let e = Edge::new(e.u, e.v, e.weight);
            lightest
                .entry((e.u, e.v))
                .and_modify(|w| *w = w.min(e.weight))
                .or_insert(e.weight);
        }
        let edges: Vec<Edge> = lightest
            .into_iter()
            .map(|((u, v), weight)| Edge { u, v, weight })
            .collect();
        let collapsed_edges = seen - edges.len();

        let mut inst = InspectionInstance {
            n,
            edges,
            adjacency: Vec::new(),
            colors,
            num_colors,
            start,
            quota,
            positions,
            collapsed_edges,
        };
        inst.rebuild_adjacency();
        Ok(inst)
    }

    fn rebuild_adjacency(&mut self) {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.u].push((e.v, e.weight));
            adj[e.v].push((e.u, e.weight));
        }
        for list in adj.iter_mut() {
            list.sort_by_key(|a| a.0);
        }
        self.adjacency = adj;
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, f64)] {
        &self.adjacency[v]
    }

    pub fn edge_weight(&self, a: VertexId, b: VertexId) -> Option<f64> {
        let list = self.adjacency.get(a)?;
        list.binary_search_by(|probe| probe.0.cmp(&b))
            .ok()
            .map(|i| list[i].1)
    }

    pub fn colors(&self, v: VertexId) -> &[Color] {
        &self.colors[v]
    }

    pub fn color_sets(&self) -> &[Vec<Color>] {
        &self.colors
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn quota(&self) -> usize {
        self.quota
    }

    pub fn positions(&self) -> Option<&[[f64; 3]]> {
        self.positions.as_deref()
    }

    /// Number of duplicate input edges dropped during construction.
    pub fn collapsed_edges(&self) -> usize {
        self.collapsed_edges
    }

    pub fn with_quota(&self, quota: usize) -> Result<Self> {
        if quota > self.num_colors {
            return Err(Error::QuotaExceedsColors {
                quota,
                colors: self.num_colors,
            });
        }
        let mut inst = self.clone();
        inst.quota = quota;
        Ok(inst)
    }

    /// Same graph with every vertex color set intersected with `keep`.
    pub fn restricted_to(&self, keep: &BTreeSet<Color>, quota: usize) -> Result<Self> {
        let mut inst = self.clone();
        for set in inst.colors.iter_mut() {
            set.retain(|c| keep.contains(c));
        }
        inst.with_quota(quota)
    }

    /// Sorted list of colors carried by at least one vertex.
    pub fn collectible_colors(&self) -> Vec<Color> {
        let set: BTreeSet<Color> = self.colors.iter().flatten().copied().collect();
        set.into_iter().collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![self.start];
        seen[self.start] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Removes the start vertex's colors from every vertex and lowers the
    /// quota accordingly; those colors are collected by every walk.
    pub fn normalize(&self) -> Result<Normalized> {
        if !self.is_connected() {
            return Err(Error::DisconnectedGraph);
        }
        let start_colors = self.colors[self.start].clone();
        if start_colors.is_empty() {
            return Ok(Normalized {
                instance: self.clone(),
                start_colors,
                original_quota: self.quota,
            });
        }
        let mut inst = self.clone();
        for set in inst.colors.iter_mut() {
            set.retain(|c| start_colors.binary_search(c).is_err());
        }
        inst.quota = self.quota.saturating_sub(start_colors.len());
        Ok(Normalized {
            instance: inst,
            start_colors,
            original_quota: self.quota,
        })
    }

    pub fn is_normalized(&self) -> bool {
        self.colors[self.start].is_empty()
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized)
        }
    }
}

/// A normalized instance together with what was stripped from it.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub instance: InspectionInstance,
    /// Colors visible at the start vertex, re-added when reporting coverage.
    pub start_colors: Vec<Color>,
    pub original_quota: usize,
}

impl Normalized {
    /// Colors collected by a walk in the original instance.
    pub fn restore_coverage(&self, collected: &[Color]) -> Vec<Color> {
        let mut all: BTreeSet<Color> = collected.iter().copied().collect();
        all.extend(self.start_colors.iter().copied());
        all.into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> InspectionInstance {
        InspectionInstance::new(
            3,
            [Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.0)],
            vec![vec![0], vec![1, 2], vec![3, 4]],
            5,
            0,
            3,
            None,
        )
        .unwrap()
    }

    #[test]
    fn normalize_strips_start_colors() {
        let norm = path3().normalize().unwrap();
        assert!(norm.instance.colors(0).is_empty());
        assert_eq!(norm.instance.quota(), 2);
        assert_eq!(norm.start_colors, vec![0]);
        assert_eq!(norm.restore_coverage(&[1, 2]), vec![0, 1, 2]);
    }

    #[test]
    fn normalize_identity_without_start_colors() {
        let inst = InspectionInstance::new(
            2,
            [Edge::new(0, 1, 1.0)],
            vec![vec![], vec![0]],
            1,
            0,
            1,
            None,
        )
        .unwrap();
        let norm = inst.normalize().unwrap();
        assert_eq!(norm.instance, inst);
    }

    #[test]
    fn normalize_drop_matches_start_color_count() {
        // 535 of 4200 colors visible from the start vertex, quota = |C|.
        let num_colors = 4200;
        let start: Vec<Color> = (0..535).collect();
        let other: Vec<Color> = (0..num_colors as Color).collect();
        let inst = InspectionInstance::new(
            2,
            [Edge::new(0, 1, 0.5)],
            vec![start, other],
            num_colors,
            0,
            num_colors,
            None,
        )
        .unwrap();
        let norm = inst.normalize().unwrap();
        assert_eq!(num_colors - norm.instance.quota(), 535);
        assert_eq!(norm.instance.colors(1).len(), num_colors - 535);
    }

    #[test]
    fn disconnected_graph_rejected() {
        let inst =
            InspectionInstance::new(3, [Edge::new(0, 1, 1.0)], vec![], 0, 0, 0, None).unwrap();
        assert!(matches!(inst.normalize(), Err(Error::DisconnectedGraph)));
    }

    #[test]
    fn quota_above_colors_rejected() {
        let err = InspectionInstance::new(1, [], vec![], 2, 0, 3, None).unwrap_err();
        assert!(matches!(err, Error::QuotaExceedsColors { .. }));
    }

    #[test]
    fn parallel_edges_keep_lightest() {
        let inst = InspectionInstance::new(
            2,
            [Edge::new(0, 1, 3.0), Edge::new(1, 0, 1.5)],
            vec![],
            0,
            0,
            0,
            None,
        )
        .unwrap();
        assert_eq!(inst.edges().len(), 1);
        assert_eq!(inst.edge_weight(1, 0), Some(1.5));
        assert_eq!(inst.collapsed_edges(), 1);
    }

    #[test]
    fn rejects_bad_edges() {
        let neg = InspectionInstance::new(2, [Edge::new(0, 1, -1.0)], vec![], 0, 0, 0, None);
        assert!(matches!(neg, Err(Error::NegativeWeight(_))));
        let lp = InspectionInstance::new(2, [Edge::new(1, 1, 1.0)], vec![], 0, 0, 0, None);
        assert!(matches!(lp, Err(Error::InvalidInstance(_))));
        let id = InspectionInstance::new(2, [Edge::new(0, 5, 1.0)], vec![], 0, 0, 0, None);
        assert!(matches!(id, Err(Error::InvalidId { id: 5, bound: 2 })));
    }
}
