//! Upper bounds from a doubled Steiner tree and bound reports pairing them
//! with the LP-relaxation lower bound.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{kruskal, Color, Edge, InspectionInstance, MetricClosure, VertexId, Walk};
use crate::ilp::{lp_lower_bound, SolverBackend};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub quota: usize,
    pub upper: f64,
    pub lower: f64,
    pub witness: Walk,
}

/// Terminals chosen greedily: repeatedly the vertex closest to the start
/// that carries a color not yet covered, ties to the smallest id, until the
/// terminals carry `quota` colors. The start is always the first terminal.
pub fn greedy_terminals(inst: &InspectionInstance, mc: &MetricClosure) -> Result<Vec<VertexId>> {
    let s = inst.start();
    let t = inst.quota();
    let mut covered: BTreeSet<Color> = inst.colors(s).iter().copied().collect();
    let mut terminals = vec![s];
    while covered.len() < t {
        let next = (0..inst.vertex_count())
            .filter(|&v| inst.colors(v).iter().any(|c| !covered.contains(c)))
            .min_by(|&a, &b| mc.dist(s, a).total_cmp(&mc.dist(s, b)).then(a.cmp(&b)));
        let Some(v) = next else {
            return Err(Error::InfeasibleQuota {
                quota: t,
                available: covered.len(),
            });
        };
        covered.extend(inst.colors(v).iter().copied());
        terminals.push(v);
    }
    Ok(terminals)
}

/// Steiner tree over `terminals` within twice the optimum: minimum spanning
/// tree of the terminals' metric closure, expanded into shortest paths,
/// re-spanned, and stripped of non-terminal leaves.
pub fn steiner_tree(
    inst: &InspectionInstance,
    mc: &MetricClosure,
    terminals: &[VertexId],
) -> Vec<Edge> {
    if terminals.len() <= 1 {
        return Vec::new();
    }
    let k = terminals.len();
    let mut closure_edges = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in (i + 1)..k {
            closure_edges.push(Edge::new(i, j, mc.dist(terminals[i], terminals[j])));
        }
    }
    let closure_tree = kruskal(k, &closure_edges, &[]);

    let mut sub: BTreeMap<(VertexId, VertexId), f64> = BTreeMap::new();
    for e in &closure_tree {
        let path = mc.path(terminals[e.u], terminals[e.v]);
        for p in path.windows(2) {
            let w = inst.edge_weight(p[0], p[1]).expect("path edge");
            sub.insert((p[0].min(p[1]), p[0].max(p[1])), w);
        }
    }
    let verts: Vec<VertexId> = sub
        .keys()
        .flat_map(|&(u, v)| [u, v])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let local: Vec<Edge> = sub
        .iter()
        .map(|(&(u, v), &w)| Edge::new(index[&u], index[&v], w))
        .collect();
    let mut tree: BTreeSet<(usize, usize)> = kruskal(verts.len(), &local, &[])
        .into_iter()
        .map(|e| (e.u, e.v))
        .collect();

    let is_terminal: BTreeSet<usize> = terminals.iter().map(|t| index[t]).collect();
    loop {
        let mut degree = vec![0usize; verts.len()];
        for &(u, v) in &tree {
            degree[u] += 1;
            degree[v] += 1;
        }
        let leaves: Vec<(usize, usize)> = tree
            .iter()
            .copied()
            .filter(|&(u, v)| {
                (degree[u] == 1 && !is_terminal.contains(&u))
                    || (degree[v] == 1 && !is_terminal.contains(&v))
            })
            .collect();
        if leaves.is_empty() {
            break;
        }
        for e in leaves {
            tree.remove(&e);
        }
    }
    tree.into_iter()
        .map(|(u, v)| {
            let (a, b) = (verts[u], verts[v]);
            Edge::new(a, b, inst.edge_weight(a, b).expect("tree edge"))
        })
        .collect()
}

/// Closed walk from `root` traversing every tree edge twice (depth first,
/// children in increasing id order).
pub fn double_tree_walk(inst: &InspectionInstance, tree: &[Edge], root: VertexId) -> Result<Walk> {
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for e in tree {
        adj.entry(e.u).or_default().push(e.v);
        adj.entry(e.v).or_default().push(e.u);
    }
    for list in adj.values_mut() {
        list.sort_unstable();
    }
    let mut seq = vec![root];
    let mut seen = BTreeSet::from([root]);
    let mut stack: Vec<(VertexId, usize)> = vec![(root, 0)];
    while let Some((v, next)) = stack.last_mut() {
        let children = adj.get(v).map(Vec::as_slice).unwrap_or(&[]);
        if let Some(&w) = children.get(*next) {
            *next += 1;
            if seen.insert(w) {
                seq.push(w);
                stack.push((w, 0));
            }
        } else {
            stack.pop();
            if let Some(&(parent, _)) = stack.last() {
                seq.push(parent);
            }
        }
    }
    Walk::from_vertices(inst, seq)
}

/// Greedy terminals, Steiner 2-approximation, doubled into a closed walk.
/// The result collects at least `quota` colors and weighs at most `quota`
/// times the optimum.
pub fn algorithm_st(inst: &InspectionInstance, mc: &MetricClosure) -> Result<Walk> {
    inst.require_normalized()?;
    let terminals = greedy_terminals(inst, mc)?;
    let tree = steiner_tree(inst, mc, &terminals);
    double_tree_walk(inst, &tree, inst.start())
}

/// One report per quota. Upper bounds take the best witness among the
/// requested quotas that are at least as large, so they never decrease as
/// the quota grows.
pub fn bound_sweep(
    inst: &InspectionInstance,
    mc: &MetricClosure,
    quotas: &[usize],
    backend: &dyn SolverBackend,
) -> Result<Vec<BoundReport>> {
    inst.require_normalized()?;
    let mut raw = Vec::with_capacity(quotas.len());
    for &t in quotas {
        let at = inst.with_quota(t)?;
        let (witness, lower) = if t == 0 {
            (Walk::trivial(inst, inst.start()), 0.0)
        } else {
            (algorithm_st(&at, mc)?, lp_lower_bound(&at, backend)?)
        };
        raw.push((t, lower, witness));
    }
    let mut reports: Vec<BoundReport> = raw
        .iter()
        .map(|(t, lower, witness)| BoundReport {
            quota: *t,
            upper: witness.weight,
            lower: *lower,
            witness: witness.clone(),
        })
        .collect();
    for report in &mut reports {
        for (t, _, witness) in &raw {
            if *t >= report.quota && witness.weight < report.upper {
                report.upper = witness.weight;
                report.witness = witness.clone();
            }
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::HighsBackend;

    fn star(t: usize) -> InspectionInstance {
        let mut colors = vec![vec![]];
        for i in 1..=t {
            colors.push(vec![(i - 1) as Color]);
        }
        colors.push((0..t as Color).collect());
        InspectionInstance::new(
            t + 2,
            (1..=t + 1).map(|v| Edge::new(0, v, 1.0)),
            colors,
            t,
            0,
            t,
            None,
        )
        .unwrap()
    }

    #[test]
    fn star_reaches_factor_t() {
        for t in 2..=8 {
            let inst = star(t);
            let mc = MetricClosure::new(&inst).unwrap();
            let walk = algorithm_st(&inst, &mc).unwrap();
            assert_eq!(walk.weight, 2.0 * t as f64);
            walk.validate(&inst, 0).unwrap();
        }
    }

    #[test]
    fn single_terminal_round_trip() {
        // 0 - 1 - 2, all colors at 2.
        let inst = InspectionInstance::new(
            3,
            [Edge::new(0, 1, 1.5), Edge::new(1, 2, 2.0)],
            vec![vec![], vec![], vec![0, 1, 2]],
            3,
            0,
            3,
            None,
        )
        .unwrap();
        let mc = MetricClosure::new(&inst).unwrap();
        let walk = algorithm_st(&inst, &mc).unwrap();
        assert_eq!(walk.vertices, vec![0, 1, 2, 1, 0]);
        assert_eq!(walk.weight, 7.0);
    }

    #[test]
    fn steiner_tree_prunes_non_terminal_leaves() {
        // Path 0-1-2-3 plus pendant 4 on 1; terminals 0 and 2.
        let inst = InspectionInstance::new(
            5,
            [
                Edge::new(0, 1, 1.0),
                Edge::new(1, 2, 1.0),
                Edge::new(2, 3, 1.0),
                Edge::new(1, 4, 1.0),
            ],
            vec![vec![]; 5],
            0,
            0,
            0,
            None,
        )
        .unwrap();
        let mc = MetricClosure::new(&inst).unwrap();
        let tree = steiner_tree(&inst, &mc, &[0, 2]);
        assert_eq!(tree, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)]);
    }

    #[test]
    fn sweep_zero_and_monotone() {
        let inst = star(4);
        let mc = MetricClosure::new(&inst).unwrap();
        let reports = bound_sweep(&inst, &mc, &[0, 1, 2, 3, 4], &HighsBackend).unwrap();
        assert_eq!(reports[0].upper, 0.0);
        assert_eq!(reports[0].lower, 0.0);
        for pair in reports.windows(2) {
            assert!(pair[0].upper <= pair[1].upper);
        }
        for r in &reports {
            assert!(r.lower <= r.upper + 1e-9);
            assert_eq!(r.witness.weight, r.upper);
            assert!(r.witness.collected.len() >= r.quota);
        }
    }

    #[test]
    fn infeasible_quota() {
        let inst = InspectionInstance::new(
            2,
            [Edge::new(0, 1, 1.0)],
            vec![vec![], vec![0]],
            3,
            0,
            2,
            None,
        )
        .unwrap();
        let mc = MetricClosure::new(&inst).unwrap();
        assert!(matches!(
            algorithm_st(&inst, &mc),
            Err(Error::InfeasibleQuota { .. })
        ));
    }
}
