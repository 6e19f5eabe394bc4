//! Merging several closed walks from a common start into one closed walk,
//! phrased as finding a light spanning Eulerian subgraph of their union.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{kruskal, Edge, InspectionInstance, VertexId, Walk, WalkMultigraph};
use crate::ilp::{build_model, recover_walk, solve, SolverBackend};

/// Largest vertex count for which [`find_undeletable_with`] tests every
/// pair of edges as a cut.
pub const FULL_CUT_MAX_VERTICES: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MergeStrategy {
    Concat,
    Greedy,
    #[default]
    Exact,
}

/// Closed walks sharing one start, with their union multigraph.
#[derive(Clone, Debug)]
pub struct MergeInput {
    pub walks: Vec<Walk>,
    pub start: VertexId,
    pub union: WalkMultigraph,
}

impl MergeInput {
    pub fn new(inst: &InspectionInstance, walks: Vec<Walk>) -> Result<Self> {
        let start = *walks
            .first()
            .and_then(|w| w.vertices.first())
            .ok_or_else(|| Error::InvalidWalk("nothing to merge".into()))?;
        let mut union = WalkMultigraph::new();
        for w in &walks {
            w.validate(inst, start)?;
            for ((u, v), e) in WalkMultigraph::from_walk(inst, w)?.edges() {
                union.add(u, v, e.weight, e.mult)?;
            }
        }
        Ok(MergeInput {
            walks,
            start,
            union,
        })
    }

    /// Vertices visited by at least one input walk.
    pub fn vertices(&self) -> BTreeSet<VertexId> {
        self.walks
            .iter()
            .flat_map(|w| w.vertices.iter().copied())
            .collect()
    }
}

/// Walks joined end to start at the common start vertex.
pub fn concat_merge(input: &MergeInput) -> Walk {
    let mut walks = input.walks.iter();
    let mut out = walks.next().expect("checked non-empty").clone();
    for w in walks {
        out.concat(w);
    }
    out
}

/// Lowers every multiplicity of four or more by twos, leaving 1, 2 or 3.
pub fn apply_rule1(g: &WalkMultigraph) -> WalkMultigraph {
    let mut out = g.clone();
    for ((u, v), e) in g.edges() {
        if e.mult >= 4 {
            out.set_multiplicity(u, v, e.weight, 2 + e.mult % 2);
        }
    }
    out
}

/// Edges any optimal spanning Eulerian subgraph keeps: those at a vertex of
/// degree two and doubled bridges of the underlying simple graph.
pub fn find_undeletable(g: &WalkMultigraph) -> BTreeSet<(VertexId, VertexId)> {
    find_undeletable_with(g, false)
}

/// With `full` set, additionally marks every pair of single edges whose
/// removal disconnects the multigraph (only up to
/// [`FULL_CUT_MAX_VERTICES`] vertices).
pub fn find_undeletable_with(g: &WalkMultigraph, full: bool) -> BTreeSet<(VertexId, VertexId)> {
    let mut marked = BTreeSet::new();
    let degrees = g.degrees();
    for ((u, v), _) in g.edges() {
        if degrees[&u] == 2 || degrees[&v] == 2 {
            marked.insert((u, v));
        }
    }
    let simple: Vec<(VertexId, VertexId)> = g.edges().map(|(k, _)| k).collect();
    for ((u, v), e) in g.edges() {
        if e.mult == 2 && !connected_without(g, &[(u, v)]) {
            marked.insert((u, v));
        }
    }
    if full && g.support().len() <= FULL_CUT_MAX_VERTICES {
        let singles: Vec<(VertexId, VertexId)> = simple
            .iter()
            .copied()
            .filter(|&(u, v)| g.multiplicity(u, v) == 1)
            .collect();
        for i in 0..singles.len() {
            for j in (i + 1)..singles.len() {
                if !connected_without(g, &[singles[i], singles[j]]) {
                    marked.insert(singles[i]);
                    marked.insert(singles[j]);
                }
            }
        }
    }
    marked
}

fn connected_without(g: &WalkMultigraph, removed: &[(VertexId, VertexId)]) -> bool {
    let mut h = g.clone();
    for &(u, v) in removed {
        h.set_multiplicity(u, v, 0.0, 0);
    }
    h.support() == g.support() && h.is_support_connected()
}

/// Forest of edge copies used while packing cycles.
#[derive(Default)]
struct Forest {
    adj: BTreeMap<VertexId, Vec<VertexId>>,
}

impl Forest {
    fn path(&self, a: VertexId, b: VertexId) -> Option<Vec<VertexId>> {
        let mut parent = BTreeMap::from([(a, a)]);
        let mut queue = VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            if v == b {
                let mut path = vec![b];
                let mut at = b;
                while at != a {
                    at = parent[&at];
                    path.push(at);
                }
                path.reverse();
                return Some(path);
            }
            for &w in self.adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(w) {
                    e.insert(v);
                    queue.push_back(w);
                }
            }
        }
        None
    }

    fn link(&mut self, a: VertexId, b: VertexId) {
        self.adj.entry(a).or_default().push(b);
        self.adj.entry(b).or_default().push(a);
    }

    fn unlink(&mut self, a: VertexId, b: VertexId) {
        for (x, y) in [(a, b), (b, a)] {
            let list = self.adj.get_mut(&x).expect("edge present");
            let i = list.iter().position(|&w| w == y).expect("edge present");
            list.swap_remove(i);
        }
    }
}

/// Subgraph left after the greedy heuristic: multiplicity reduction, a minimum spanning
/// tree holding every undeletable edge, and a greedy packing of cycles among
/// the remaining edge copies (heaviest first, ties to smaller endpoints)
/// that are then deleted.
pub fn greedy_merge_multigraph(g: &WalkMultigraph) -> Result<WalkMultigraph> {
    let mut kept = apply_rule1(g);
    if kept.is_empty() {
        return Ok(kept);
    }
    let undeletable = find_undeletable(&kept);
    let vertices: Vec<VertexId> = kept.support().into_iter().collect();
    let index: BTreeMap<VertexId, usize> =
        vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let local = |&((u, v), e): &((VertexId, VertexId), crate::graph::MultiEdge)| {
        Edge::new(index[&u], index[&v], e.weight)
    };
    let all: Vec<_> = kept.edges().collect();
    let forced: Vec<Edge> = all
        .iter()
        .filter(|(k, _)| undeletable.contains(k))
        .map(local)
        .collect();
    let tree = kruskal(
        vertices.len(),
        &all.iter().map(local).collect::<Vec<_>>(),
        &forced,
    );

    let mut rest: BTreeMap<(VertexId, VertexId), (u32, f64)> =
        all.iter().map(|&(k, e)| (k, (e.mult, e.weight))).collect();
    for e in &tree {
        let k = (vertices[e.u], vertices[e.v]);
        rest.get_mut(&k).expect("tree edge").0 -= 1;
    }
    let mut copies: Vec<((VertexId, VertexId), f64)> = rest
        .iter()
        .flat_map(|(&k, &(m, w))| std::iter::repeat_n((k, w), m as usize))
        .collect();
    copies.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut forest = Forest::default();
    for ((u, v), _) in copies {
        match forest.path(u, v) {
            Some(path) => {
                for p in path.windows(2) {
                    forest.unlink(p[0], p[1]);
                }
                let mut cycle = path;
                cycle.push(u);
                for p in cycle.windows(2) {
                    let (a, b) = (p[0], p[1]);
                    let w = rest[&(a.min(b), a.max(b))].1;
                    kept.set_multiplicity(a, b, w, kept.multiplicity(a, b) - 1);
                }
                if let Some((v, d)) = kept.degrees().into_iter().find(|(_, d)| d % 2 == 1) {
                    return Err(Error::NotEulerian(format!(
                        "vertex {v} has odd degree {d} after removing a cycle"
                    )));
                }
            }
            None => forest.link(u, v),
        }
    }
    Ok(kept)
}

/// Greedy heuristic toured from the common start.
pub fn greedy_merge(inst: &InspectionInstance, input: &MergeInput) -> Result<Walk> {
    greedy_merge_multigraph(&input.union)?.to_walk(inst, input.start)
}

/// Optimal spanning Eulerian subgraph of the union using every available
/// edge at most twice, and single-copy edges at most once. Solved as an
/// inspection model on the union's vertices with one private color per
/// non-start vertex and every color required.
pub fn exact_merge(
    inst: &InspectionInstance,
    input: &MergeInput,
    backend: &dyn SolverBackend,
    time_limit: Option<Duration>,
) -> Result<Walk> {
    let g = apply_rule1(&input.union);
    if g.is_empty() {
        return Ok(Walk::trivial(inst, input.start));
    }
    let vertices: Vec<VertexId> = g.support().into_iter().collect();
    let index: BTreeMap<VertexId, usize> =
        vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let s = index[&input.start];
    let mut colors = vec![Vec::new(); vertices.len()];
    let mut next = 0;
    for (i, set) in colors.iter_mut().enumerate() {
        if i != s {
            set.push(next);
            next += 1;
        }
    }
    let sub = InspectionInstance::new(
        vertices.len(),
        g.edges()
            .map(|((u, v), e)| Edge::new(index[&u], index[&v], e.weight)),
        colors,
        next as usize,
        s,
        next as usize,
        None,
    )?;
    let mut model = build_model(&sub)?;
    for ((u, v), e) in g.edges() {
        if e.mult == 1 {
            model.add_capacity_one(index[&u], index[&v])?;
        }
    }
    let sol = solve(&model, backend, time_limit)?;
    let local = recover_walk(&sub, &model, &sol)?;
    Walk::from_vertices(inst, local.vertices.iter().map(|&v| vertices[v]).collect())
}

/// Merges with the chosen strategy.
pub fn merge_walks(
    inst: &InspectionInstance,
    input: &MergeInput,
    strategy: MergeStrategy,
    backend: &dyn SolverBackend,
    time_limit: Option<Duration>,
) -> Result<Walk> {
    match strategy {
        MergeStrategy::Concat => Ok(concat_merge(input)),
        MergeStrategy::Greedy => greedy_merge(inst, input),
        MergeStrategy::Exact => exact_merge(inst, input, backend, time_limit),
    }
}
