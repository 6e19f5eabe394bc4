use petgraph::unionfind::UnionFind;

use super::instance::{Edge, InspectionInstance};

/// Kruskal over `edges` on vertices `0..n`. Ties on weight fall back to the
/// smaller `(u, v)` pair. Edges in `forced` are taken first regardless of
/// weight (even if they close cycles among themselves).
pub fn kruskal(n: usize, edges: &[Edge], forced: &[Edge]) -> Vec<Edge> {
    let mut uf = UnionFind::<usize>::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1) + forced.len());
    for e in forced {
        uf.union(e.u, e.v);
        tree.push(*e);
    }
    let mut sorted: Vec<Edge> = edges.to_vec();
    sorted.sort_by(|a, b| {
        a.weight
            .total_cmp(&b.weight)
            .then(a.u.cmp(&b.u))
            .then(a.v.cmp(&b.v))
    });
    for e in sorted {
        if uf.union(e.u, e.v) {
            tree.push(e);
        }
    }
    tree
}

/// Minimum spanning forest of the instance graph.
pub fn minimum_spanning_tree(inst: &InspectionInstance) -> Vec<Edge> {
    kruskal(inst.vertex_count(), inst.edges(), &[])
}
