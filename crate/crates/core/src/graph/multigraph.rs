use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::instance::{InspectionInstance, VertexId};
use super::walk::Walk;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiEdge {
    pub mult: u32,
    pub weight: f64,
}

/// Loopless multigraph stored as multiplicities over simple edges `(u, v)`
/// with `u < v`. Closed walks map to connected Eulerian multigraphs and back.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WalkMultigraph {
    edges: BTreeMap<(VertexId, VertexId), MultiEdge>,
}

fn key(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl WalkMultigraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `mult` copies of edge `ab`. Self-loops are rejected.
    pub fn add(&mut self, a: VertexId, b: VertexId, weight: f64, mult: u32) -> Result<()> {
        if a == b {
            return Err(Error::InvalidWalk(format!("self-loop at {a}")));
        }
        if mult == 0 {
            return Ok(());
        }
        self.edges
            .entry(key(a, b))
            .and_modify(|e| e.mult += mult)
            .or_insert(MultiEdge { mult, weight });
        Ok(())
    }

    /// Sets the multiplicity of an existing or new edge; zero removes it.
    pub fn set_multiplicity(&mut self, a: VertexId, b: VertexId, weight: f64, mult: u32) {
        if mult == 0 {
            self.edges.remove(&key(a, b));
        } else {
            self.edges.insert(key(a, b), MultiEdge { mult, weight });
        }
    }

    /// Each traversal of an undirected edge counts once.
    pub fn from_walk(inst: &InspectionInstance, walk: &Walk) -> Result<Self> {
        let mut g = WalkMultigraph::new();
        for pair in walk.vertices.windows(2) {
            let w = inst.edge_weight(pair[0], pair[1]).ok_or_else(|| {
                Error::InvalidWalk(format!("{} and {} are not adjacent", pair[0], pair[1]))
            })?;
            g.add(pair[0], pair[1], w, 1)?;
        }
        Ok(g)
    }

    pub fn multiplicity(&self, a: VertexId, b: VertexId) -> u32 {
        self.edges.get(&key(a, b)).map_or(0, |e| e.mult)
    }

    pub fn edges(&self) -> impl Iterator<Item = ((VertexId, VertexId), MultiEdge)> + '_ {
        self.edges.iter().map(|(&k, &e)| (k, e))
    }

    pub fn simple_edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.edges.values().map(|e| e.mult as usize).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.values().map(|e| e.weight * e.mult as f64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn degrees(&self) -> BTreeMap<VertexId, usize> {
        let mut deg = BTreeMap::new();
        for (&(u, v), e) in &self.edges {
            *deg.entry(u).or_insert(0) += e.mult as usize;
            *deg.entry(v).or_insert(0) += e.mult as usize;
        }
        deg
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .filter(|(&(a, b), _)| a == v || b == v)
            .map(|(_, e)| e.mult as usize)
            .sum()
    }

    /// Vertices incident to at least one edge.
    pub fn support(&self) -> BTreeSet<VertexId> {
        self.edges.keys().flat_map(|&(u, v)| [u, v]).collect()
    }

    /// Neighbor lists of the underlying simple graph.
    pub fn simple_adjacency(&self) -> BTreeMap<VertexId, Vec<VertexId>> {
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for &(u, v) in self.edges.keys() {
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
        adj
    }

    pub fn is_support_connected(&self) -> bool {
        let adj = self.simple_adjacency();
        let Some(&first) = adj.keys().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([first]);
        let mut stack = vec![first];
        while let Some(v) = stack.pop() {
            for &w in &adj[&v] {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == adj.len()
    }

    pub fn is_eulerian(&self) -> bool {
        self.degrees().values().all(|d| d % 2 == 0) && self.is_support_connected()
    }

    /// Hierholzer's algorithm; returns a closed vertex sequence starting and
    /// ending at `start` that uses every edge copy exactly once. An empty
    /// multigraph yields `[start]`.
    pub fn euler_tour(&self, start: VertexId) -> Result<Vec<VertexId>> {
        if self.edges.is_empty() {
            return Ok(vec![start]);
        }
        if let Some((v, d)) = self.degrees().into_iter().find(|(_, d)| d % 2 == 1) {
            return Err(Error::NotEulerian(format!("vertex {v} has odd degree {d}")));
        }
        if !self.is_support_connected() {
            return Err(Error::NotEulerian("support is disconnected".into()));
        }
        let support = self.support();
        if !support.contains(&start) {
            return Err(Error::StartOffSupport(start));
        }

        // Expand multiplicities into individual edge copies.
        let index: BTreeMap<VertexId, usize> =
            support.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let vertices: Vec<VertexId> = support.into_iter().collect();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vertices.len()];
        let mut copies = 0usize;
        for (&(u, v), e) in &self.edges {
            let (iu, iv) = (index[&u], index[&v]);
            for _ in 0..e.mult {
                adj[iu].push((iv, copies));
                adj[iv].push((iu, copies));
                copies += 1;
            }
        }
        let mut used = vec![false; copies];
        let mut cursor = vec![0usize; vertices.len()];
        let mut stack = vec![index[&start]];
        let mut circuit = Vec::with_capacity(copies + 1);
        while let Some(&v) = stack.last() {
            let list = &adj[v];
            while cursor[v] < list.len() && used[list[cursor[v]].1] {
                cursor[v] += 1;
            }
            if cursor[v] == list.len() {
                circuit.push(vertices[v]);
                stack.pop();
            } else {
                let (w, id) = list[cursor[v]];
                used[id] = true;
                stack.push(w);
            }
        }
        circuit.reverse();
        Ok(circuit)
    }

    /// Euler tour wrapped as a walk of `inst`.
    pub fn to_walk(&self, inst: &InspectionInstance, start: VertexId) -> Result<Walk> {
        Walk::from_vertices(inst, self.euler_tour(start)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn multiset_of_tour(tour: &[VertexId]) -> BTreeMap<(VertexId, VertexId), u32> {
        let mut m = BTreeMap::new();
        for p in tour.windows(2) {
            *m.entry(key(p[0], p[1])).or_insert(0) += 1;
        }
        m
    }

    #[test]
    fn triangle_tour_is_the_cycle() {
        let mut g = WalkMultigraph::new();
        g.add(0, 1, 1.0, 1).unwrap();
        g.add(1, 2, 1.0, 1).unwrap();
        g.add(0, 2, 1.0, 1).unwrap();
        let tour = g.euler_tour(0).unwrap();
        assert_eq!(tour.len(), 4);
        assert_eq!(tour[0], 0);
        assert_eq!(tour[3], 0);
        let mut mid = vec![tour[1], tour[2]];
        mid.sort();
        assert_eq!(mid, vec![1, 2]);
    }

    #[test]
    fn doubled_edge_tour() {
        let mut g = WalkMultigraph::new();
        g.add(3, 5, 2.0, 2).unwrap();
        assert_eq!(g.euler_tour(3).unwrap(), vec![3, 5, 3]);
    }

    #[test]
    fn rejects_odd_and_disconnected() {
        let mut g = WalkMultigraph::new();
        g.add(0, 1, 1.0, 1).unwrap();
        assert!(matches!(g.euler_tour(0), Err(Error::NotEulerian(_))));
        g.add(0, 1, 1.0, 1).unwrap();
        g.add(2, 3, 1.0, 2).unwrap();
        assert!(!g.is_eulerian());
        assert!(matches!(g.euler_tour(0), Err(Error::NotEulerian(_))));
        let mut h = WalkMultigraph::new();
        h.add(0, 1, 1.0, 2).unwrap();
        assert!(matches!(h.euler_tour(4), Err(Error::StartOffSupport(4))));
    }

    #[test]
    fn walk_multiplicities() {
        let inst = InspectionInstance::new(
            4,
            [
                super::super::Edge::new(0, 1, 1.0),
                super::super::Edge::new(1, 2, 1.0),
                super::super::Edge::new(2, 3, 1.0),
                super::super::Edge::new(3, 0, 1.0),
            ],
            vec![],
            0,
            0,
            0,
            None,
        )
        .unwrap();
        let back = Walk::from_vertices(&inst, vec![0, 1, 0]).unwrap();
        let g = WalkMultigraph::from_walk(&inst, &back).unwrap();
        assert_eq!(g.multiplicity(0, 1), 2);
        let cyc = Walk::from_vertices(&inst, vec![0, 1, 2, 3, 0]).unwrap();
        let g = WalkMultigraph::from_walk(&inst, &cyc).unwrap();
        assert!(g.edges().all(|(_, e)| e.mult == 1));
        assert!(g.is_eulerian());
    }

    #[test]
    fn random_eulerian_multigraphs_tour_every_copy() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            // Union of random closed vertex cycles through vertex 0 on 8 vertices.
            let mut g = WalkMultigraph::new();
            for _ in 0..rng.gen_range(1..4) {
                let len = rng.gen_range(2..7);
                let mut cyc = vec![0usize];
                for _ in 0..len {
                    let mut v = rng.gen_range(0..8);
                    while v == *cyc.last().unwrap() {
                        v = rng.gen_range(0..8);
                    }
                    cyc.push(v);
                }
                if *cyc.last().unwrap() == 0 {
                    cyc.pop();
                }
                cyc.push(0);
                for p in cyc.windows(2) {
                    g.add(p[0], p[1], 1.0, 1).unwrap();
                }
            }
            assert!(g.is_eulerian());
            let tour = g.euler_tour(0).unwrap();
            assert_eq!(tour.first(), Some(&0));
            assert_eq!(tour.last(), Some(&0));
            let expected: BTreeMap<_, _> = g.edges().map(|(k, e)| (k, e.mult)).collect();
            assert_eq!(multiset_of_tour(&tour), expected);
        }
    }
}
