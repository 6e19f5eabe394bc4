use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;

use super::backend::{Capabilities, IlpSolution, SolveParams, SolveStatus, SolverBackend};
use super::model::{IlpModel, FEAS_TOL};
use crate::error::{Error, Result};
use crate::graph::{InspectionInstance, MetricClosure, VertexId, Walk, WalkMultigraph};
use crate::oracle::brute_force_gi;

/// Backend without external dependencies: solves the model's source
/// instance by enumeration and translates the optimal walk into a model
/// assignment. Only models produced by `build_model` on small instances are
/// accepted, and there is no LP relaxation.
#[derive(Clone, Copy, Debug, Default)]
pub struct ReferenceBackend;

impl SolverBackend for ReferenceBackend {
    fn name(&self) -> &str {
        "reference"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            milp: true,
            lp_relaxation: false,
            time_limit: true,
            threads: false,
        }
    }

    fn solve(&self, model: &IlpModel, params: &SolveParams) -> Result<IlpSolution> {
        if params.relax {
            return Err(Error::BackendUnavailable(
                "the reference backend has no LP relaxation".into(),
            ));
        }
        if params.time_limit.is_some_and(|t| t.is_zero()) {
            return Ok(IlpSolution::without_assignment(SolveStatus::Timeout));
        }
        let inst = match model.source() {
            Some(inst) if !model.has_extra_rows() => inst,
            _ => {
                return Err(Error::ModelRejected(
                    "the reference backend only accepts unmodified inspection models".into(),
                ))
            }
        };
        let mc = MetricClosure::new(inst)?;
        let walk = match brute_force_gi(inst, &mc) {
            Ok(w) => w,
            Err(Error::InfeasibleQuota { .. }) => {
                return Ok(IlpSolution::without_assignment(SolveStatus::Infeasible))
            }
            Err(Error::LimitExceeded(msg)) => return Err(Error::ModelRejected(msg)),
            Err(e) => return Err(e),
        };
        let walk = if walk.edge_count() == 0 {
            cheapest_round_trip(inst)?
        } else {
            minimal_walk(inst, &walk)?
        };
        let values = assignment_from_walk(model, &walk)?;
        model
            .check(&values, FEAS_TOL)
            .map_err(|e| Error::ModelRejected(format!("replayed assignment infeasible: {e}")))?;
        Ok(IlpSolution {
            status: SolveStatus::Optimal,
            objective: model.objective(&values),
            values,
        })
    }
}

/// The model requires at least one edge; with nothing to collect the best
/// such walk goes to the nearest neighbor and back.
fn cheapest_round_trip(inst: &InspectionInstance) -> Result<Walk> {
    let s = inst.start();
    let &(u, _) = inst
        .neighbors(s)
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .ok_or(Error::DegenerateInstance)?;
    Walk::from_vertices(inst, vec![s, u, s])
}

/// Rewrites a closed walk into one of no greater weight over a subset of its
/// edges that visits the same vertices, uses at most `2n' - 2` edges (`n'`
/// visited vertices) and never repeats a directed edge.
///
/// Multiplicities are first cut to one or two by removing pairs; then, as
/// long as the edges outside a spanning tree contain a cycle, that cycle is
/// removed. Edges used twice are oriented both ways, and the remaining
/// edges, which form an even subgraph, are oriented along Euler circuits of
/// their components.
pub fn minimal_walk(inst: &InspectionInstance, walk: &Walk) -> Result<Walk> {
    let s = *walk
        .vertices
        .first()
        .ok_or_else(|| Error::InvalidWalk("empty walk".into()))?;
    if !walk.is_closed() {
        return Err(Error::InvalidWalk("walk is not closed".into()));
    }
    let mut h = WalkMultigraph::from_walk(inst, walk)?;
    if h.is_empty() {
        return Ok(walk.clone());
    }
    let pairs: Vec<((VertexId, VertexId), u32, f64)> =
        h.edges().map(|(k, e)| (k, e.mult, e.weight)).collect();
    for ((u, v), mult, w) in pairs {
        if mult > 2 {
            h.set_multiplicity(u, v, w, 2 - mult % 2);
        }
    }
    while let Some(cycle) = cycle_outside_tree(&h, s) {
        for (u, v) in cycle {
            let e = h
                .edges()
                .find(|&(k, _)| k == (u, v))
                .map(|(_, e)| e)
                .expect("cycle edge exists");
            h.set_multiplicity(u, v, e.weight, e.mult - 1);
        }
    }

    let mut arcs: Vec<(VertexId, VertexId)> = Vec::new();
    let mut odd = WalkMultigraph::new();
    for ((u, v), e) in h.edges() {
        if e.mult == 2 {
            arcs.push((u, v));
            arcs.push((v, u));
        } else {
            odd.add(u, v, e.weight, 1)?;
        }
    }
    // Orient each component of the single-use edges along an Euler circuit.
    let mut remaining = odd;
    loop {
        let Some(a) = remaining.edges().next().map(|((a, _), _)| a) else {
            break;
        };
        let comp = component_of(&remaining, a);
        let mut sub = WalkMultigraph::new();
        for ((u, v), e) in remaining.edges() {
            if comp.contains(&u) {
                sub.add(u, v, e.weight, e.mult)?;
            }
        }
        let tour = sub.euler_tour(a)?;
        for p in tour.windows(2) {
            arcs.push((p[0], p[1]));
        }
        for ((u, v), e) in sub.edges() {
            remaining.set_multiplicity(u, v, e.weight, 0);
        }
    }
    let circuit = directed_euler_circuit(&arcs, s)?;
    Walk::from_vertices(inst, circuit)
}

fn component_of(g: &WalkMultigraph, from: VertexId) -> BTreeSet<VertexId> {
    let adj = g.simple_adjacency();
    let mut seen = BTreeSet::from([from]);
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        for &w in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen
}

/// A cycle among the edge copies left after removing one copy of each edge
/// of a BFS spanning tree rooted at `root`, as a list of simple edges.
fn cycle_outside_tree(h: &WalkMultigraph, root: VertexId) -> Option<Vec<(VertexId, VertexId)>> {
    let adj = h.simple_adjacency();
    let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut tree: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    let mut queue = std::collections::VecDeque::from([root]);
    parent.insert(root, root);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[&v] {
            if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(w) {
                e.insert(v);
                tree.insert((v.min(w), v.max(w)));
                queue.push_back(w);
            }
        }
    }
    let mut rest: Vec<(VertexId, VertexId)> = Vec::new();
    for ((u, v), e) in h.edges() {
        let left = e.mult - u32::from(tree.contains(&(u, v)));
        if left >= 2 {
            return Some(vec![(u, v), (u, v)]);
        }
        if left == 1 {
            rest.push((u, v));
        }
    }
    // A simple cycle among the leftover single copies.
    let verts: Vec<VertexId> = h.support().into_iter().collect();
    let idx: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::<usize>::new(verts.len());
    let mut forest: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for (u, v) in rest {
        if !uf.union(idx[&u], idx[&v]) {
            let mut path = forest_path(&forest, u, v);
            path.push((u, v));
            return Some(path);
        }
        forest.entry(u).or_default().push(v);
        forest.entry(v).or_default().push(u);
    }
    None
}

fn forest_path(
    forest: &BTreeMap<VertexId, Vec<VertexId>>,
    from: VertexId,
    to: VertexId,
) -> Vec<(VertexId, VertexId)> {
    let mut prev: BTreeMap<VertexId, VertexId> = BTreeMap::from([(from, from)]);
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        if v == to {
            break;
        }
        for &w in forest.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            if let std::collections::btree_map::Entry::Vacant(e) = prev.entry(w) {
                e.insert(v);
                stack.push(w);
            }
        }
    }
    let mut out = Vec::new();
    let mut cur = to;
    while cur != from {
        let p = prev[&cur];
        out.push((p.min(cur), p.max(cur)));
        cur = p;
    }
    out
}

fn directed_euler_circuit(arcs: &[(VertexId, VertexId)], start: VertexId) -> Result<Vec<VertexId>> {
    let mut out: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    let mut balance: BTreeMap<VertexId, i64> = BTreeMap::new();
    for &(u, v) in arcs {
        out.entry(u).or_default().push(v);
        *balance.entry(u).or_insert(0) += 1;
        *balance.entry(v).or_insert(0) -= 1;
    }
    if balance.values().any(|&b| b != 0) {
        return Err(Error::NotEulerian("unbalanced orientation".into()));
    }
    for list in out.values_mut() {
        list.reverse();
    }
    let mut stack = vec![start];
    let mut circuit = Vec::with_capacity(arcs.len() + 1);
    while let Some(&v) = stack.last() {
        match out.get_mut(&v).and_then(Vec::pop) {
            Some(w) => stack.push(w),
            None => {
                circuit.push(v);
                stack.pop();
            }
        }
    }
    circuit.reverse();
    if circuit.len() != arcs.len() + 1 {
        return Err(Error::NotEulerian(
            "arcs are not connected to the start".into(),
        ));
    }
    Ok(circuit)
}

/// Model assignment encoding a closed walk from the start that repeats no
/// directed edge: `x` marks the used directed edges, `z` the collected
/// colors, and `y` spreads the charges of each excursion from the start.
///
/// For an excursion `s = v_0, v_1, .., v_L = s`, the edge `v_i v_{i+1}`
/// (`1 <= i <= L-2`) gives `2 - 2i/(L-1)` charges to `v_i` and `2i/(L-1)`
/// to `v_{i+1}`, so every visit inside the excursion absorbs exactly
/// `2 - 2/(L-1)`. This stays within the consumption rows whenever every
/// excursion has at most `2n - 2` edges.
pub fn assignment_from_walk(model: &IlpModel, walk: &Walk) -> Result<Vec<f64>> {
    let s = model.start();
    let vs = &walk.vertices;
    if vs.len() < 2 || vs[0] != s || vs[vs.len() - 1] != s {
        return Err(Error::InvalidWalk(
            "need a closed walk from the start with at least one edge".into(),
        ));
    }
    let mut values = vec![0.0; model.variables.len()];
    for p in vs.windows(2) {
        let i = model
            .x(p[0], p[1])
            .ok_or_else(|| Error::InvalidWalk(format!("no edge {}-{}", p[0], p[1])))?;
        if values[i] != 0.0 {
            return Err(Error::InvalidWalk(format!(
                "directed edge {}->{} repeats",
                p[0], p[1]
            )));
        }
        values[i] = 1.0;
    }
    let mut begin = 0;
    for end in 1..vs.len() {
        if vs[end] != s {
            continue;
        }
        let seg = &vs[begin..=end];
        let len = seg.len() - 1;
        if len >= 3 {
            let denom = (len - 1) as f64;
            for i in 1..=len - 2 {
                let (a, b) = (seg[i], seg[i + 1]);
                let share = 2.0 * i as f64 / denom;
                let ya = model.y(a, b, a).expect("edge away from the start");
                let yb = model.y(a, b, b).expect("edge away from the start");
                values[ya] += 2.0 - share;
                values[yb] += share;
            }
        }
        begin = end;
    }
    for (c, i) in model.z_vars() {
        if walk.collected.binary_search(&c).is_ok() {
            values[i] = 1.0;
        }
    }
    Ok(values)
}
