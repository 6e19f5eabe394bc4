//! Exhaustive reference solvers for tiny inputs. They share only the basic
//! graph types with the production solvers and are used to cross-check them.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::graph::{
    expand_closure_walk, Color, InspectionInstance, MetricClosure, VertexId, Walk, WalkMultigraph,
};

#[derive(Clone, Debug)]
pub struct OracleLimits {
    pub max_vertices: usize,
    pub max_colors: usize,
    pub max_nodes: u64,
    /// Largest cycle rank (`m - n + 1`) of a multigraph's support accepted
    /// by [`brute_force_mses`].
    pub max_cycle_rank: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_vertices: 12,
            max_colors: 8,
            max_nodes: 10_000_000,
            max_cycle_rank: 23,
        }
    }
}

/// Exact graph inspection by enumeration: every sequence of stops over the
/// metric closure in which each stop adds a new color, closed at the start.
/// Colors at the start count as collected. Works on raw or normalized
/// instances.
pub fn brute_force_gi(inst: &InspectionInstance, mc: &MetricClosure) -> Result<Walk> {
    brute_force_gi_with(inst, mc, &OracleLimits::default())
}

pub fn brute_force_gi_with(
    inst: &InspectionInstance,
    mc: &MetricClosure,
    limits: &OracleLimits,
) -> Result<Walk> {
    let n = inst.vertex_count();
    let colors = inst.collectible_colors();
    if n > limits.max_vertices {
        return Err(Error::LimitExceeded(format!(
            "{n} vertices (limit {})",
            limits.max_vertices
        )));
    }
    if colors.len() > limits.max_colors {
        return Err(Error::LimitExceeded(format!(
            "{} colors (limit {})",
            colors.len(),
            limits.max_colors
        )));
    }
    let mask_of = |cs: &[Color]| -> u32 {
        cs.iter()
            .map(|c| 1u32 << colors.binary_search(c).expect("collectible color"))
            .fold(0, |a, b| a | b)
    };
    let masks: Vec<u32> = (0..n).map(|v| mask_of(inst.colors(v))).collect();
    let s = inst.start();
    let t = inst.quota();
    if (colors.len()) < t {
        return Err(Error::InfeasibleQuota {
            quota: t,
            available: colors.len(),
        });
    }

    struct Search<'a> {
        mc: &'a MetricClosure,
        masks: &'a [u32],
        s: VertexId,
        t: u32,
        best: f64,
        best_seq: Vec<VertexId>,
        seq: Vec<VertexId>,
        nodes: u64,
        max_nodes: u64,
    }

    impl Search<'_> {
        fn go(&mut self, v: VertexId, have: u32, cost: f64) -> Result<()> {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(Error::LimitExceeded(format!(
                    "more than {} enumeration nodes",
                    self.max_nodes
                )));
            }
            let back = cost + self.mc.dist(v, self.s);
            // Any continuation returns to the start, which costs at least
            // the direct distance.
            if back >= self.best {
                return Ok(());
            }
            if have.count_ones() >= self.t {
                self.best = back;
                self.best_seq = self.seq.clone();
                self.best_seq.push(self.s);
                return Ok(());
            }
            for u in 0..self.masks.len() {
                if self.masks[u] & !have != 0 {
                    self.seq.push(u);
                    self.go(u, have | self.masks[u], cost + self.mc.dist(v, u))?;
                    self.seq.pop();
                }
            }
            Ok(())
        }
    }

    let mut search = Search {
        mc,
        masks: &masks,
        s,
        t: t as u32,
        best: f64::INFINITY,
        best_seq: Vec::new(),
        seq: vec![s],
        nodes: 0,
        max_nodes: limits.max_nodes,
    };
    search.go(s, masks[s], 0.0)?;
    if search.best_seq.is_empty() {
        return Err(Error::InfeasibleQuota {
            quota: t,
            available: colors.len(),
        });
    }
    expand_closure_walk(inst, &search.best_seq, mc)
}

/// Minimum-weight connected Eulerian submultigraph of `g` that touches every
/// vertex of `g`, with each multiplicity at most the input one.
///
/// Every candidate has a parity pattern that is an even subgraph of the
/// support; for a fixed pattern the cheapest completion adds doubled copies
/// along a minimum spanning forest of the pattern's components, using only
/// edges with two spare copies. Enumerating the whole cycle space therefore
/// covers every multiplicity vector.
pub fn brute_force_mses(g: &WalkMultigraph) -> Result<WalkMultigraph> {
    brute_force_mses_with(g, &OracleLimits::default())
}

pub fn brute_force_mses_with(g: &WalkMultigraph, limits: &OracleLimits) -> Result<WalkMultigraph> {
    if g.is_empty() {
        return Ok(WalkMultigraph::new());
    }
    let verts: Vec<VertexId> = g.support().into_iter().collect();
    let index: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = verts.len();
    if n > limits.max_vertices {
        return Err(Error::LimitExceeded(format!(
            "{n} vertices (limit {})",
            limits.max_vertices
        )));
    }
    if !g.is_support_connected() {
        return Err(Error::NotEulerian("support is disconnected".into()));
    }
    let edges: Vec<(usize, usize, f64, u32)> = g
        .edges()
        .map(|((u, v), e)| (index[&u], index[&v], e.weight, e.mult))
        .collect();
    let m = edges.len();
    let rank = m + 1 - n;
    if rank > limits.max_cycle_rank {
        return Err(Error::LimitExceeded(format!(
            "cycle rank {rank} (limit {})",
            limits.max_cycle_rank
        )));
    }

    // Fundamental cycles of a BFS spanning tree, as edge bitsets.
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (id, &(a, b, _, _)) in edges.iter().enumerate() {
        adj[a].push((b, id));
        adj[b].push((a, id));
    }
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut in_tree = vec![false; m];
    depth[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for &(w, id) in &adj[v] {
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                parent[w] = Some((v, id));
                in_tree[id] = true;
                queue.push_back(w);
            }
        }
    }
    let tree_path = |mut a: usize, mut b: usize| -> u128 {
        let mut bits = 0u128;
        while a != b {
            if depth[a] >= depth[b] {
                let (p, id) = parent[a].expect("non-root has a parent");
                bits ^= 1 << id;
                a = p;
            } else {
                let (p, id) = parent[b].expect("non-root has a parent");
                bits ^= 1 << id;
                b = p;
            }
        }
        bits
    };
    if m > 128 {
        return Err(Error::LimitExceeded(format!("{m} edges (limit 128)")));
    }
    let basis: Vec<u128> = (0..m)
        .filter(|&id| !in_tree[id])
        .map(|id| tree_path(edges[id].0, edges[id].1) ^ (1 << id))
        .collect();
    debug_assert_eq!(basis.len(), rank);

    let mut best = (f64::INFINITY, 0u128, Vec::<usize>::new());
    let mut pattern = 0u128;
    let total = 1u64 << rank;
    for step in 0..total {
        if step > 0 {
            // Gray code: flip the basis vector at the lowest set bit.
            pattern ^= basis[step.trailing_zeros() as usize];
        }
        if let Some((w, doubled)) = complete(&edges, n, pattern) {
            if w < best.0 {
                best = (w, pattern, doubled);
            }
        }
    }
    if !best.0.is_finite() {
        return Err(Error::NotEulerian(
            "no spanning Eulerian submultigraph".into(),
        ));
    }
    let (_, pattern, doubled) = best;
    let mut out = WalkMultigraph::new();
    for (id, &(a, b, w, _)) in edges.iter().enumerate() {
        let mut mult = ((pattern >> id) & 1) as u32;
        if doubled.contains(&id) {
            mult += 2;
        }
        out.set_multiplicity(verts[a], verts[b], w, mult);
    }
    Ok(out)
}

/// Cheapest completion of a parity pattern into a connected spanning
/// multigraph; returns the total weight and the edges that get two extra
/// copies.
fn complete(
    edges: &[(usize, usize, f64, u32)],
    n: usize,
    pattern: u128,
) -> Option<(f64, Vec<usize>)> {
    let mut uf = UnionFind::<usize>::new(n);
    let mut weight = 0.0;
    for (id, &(a, b, w, _)) in edges.iter().enumerate() {
        if (pattern >> id) & 1 == 1 {
            uf.union(a, b);
            weight += w;
        }
    }
    // Kruskal on the spare-pair edges over the pattern's components.
    let mut spare: Vec<(f64, usize)> = edges
        .iter()
        .enumerate()
        .filter(|(id, e)| e.3 >= ((pattern >> id) & 1) as u32 + 2)
        .map(|(id, e)| (e.2, id))
        .collect();
    spare.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut doubled = Vec::new();
    for (w, id) in spare {
        if uf.union(edges[id].0, edges[id].1) {
            weight += 2.0 * w;
            doubled.push(id);
        }
    }
    let root = uf.find(0);
    if (1..n).all(|v| uf.find(v) == root) {
        Some((weight, doubled))
    } else {
        None
    }
}

/// Whether the simple graph on `0..n` has a Hamiltonian cycle. Graphs with
/// fewer than three vertices have none.
pub fn hamiltonian_check(n: usize, edges: &[(VertexId, VertexId)]) -> Result<bool> {
    if n > 10 {
        return Err(Error::LimitExceeded(format!("{n} vertices (limit 10)")));
    }
    if n < 3 {
        return Ok(false);
    }
    let mut adj = vec![0u16; n];
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(Error::InvalidId {
                id: a.max(b),
                bound: n,
            });
        }
        if a != b {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
    }
    fn extend(adj: &[u16], v: usize, used: u16, n: usize) -> bool {
        if used.count_ones() as usize == n {
            return adj[v] & 1 == 1;
        }
        (0..n)
            .any(|w| adj[v] >> w & 1 == 1 && used >> w & 1 == 0 && extend(adj, w, used | 1 << w, n))
    }
    Ok(extend(&adj, 0, 1, n))
}

/// Simple graph with every edge of `edges` doubled, as a multigraph with
/// unit weights.
pub fn doubled_unit_multigraph(edges: &[(VertexId, VertexId)]) -> Result<WalkMultigraph> {
    let mut g = WalkMultigraph::new();
    let set: BTreeSet<(VertexId, VertexId)> =
        edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    for (a, b) in set {
        g.add(a, b, 1.0, 2)?;
    }
    Ok(g)
}
