//! Random instance families shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use gi_core::graph::{Color, Edge, InspectionInstance, MetricClosure, VertexId, Walk};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected simple graph on `0..n`: a random tree plus extra edges with
/// probability `p`.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(VertexId, VertexId)> {
    let mut set = BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        set.insert((u, v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                set.insert((u, v));
            }
        }
    }
    set.into_iter().collect()
}

fn weight(rng: &mut ChaCha8Rng, integral: bool) -> f64 {
    if integral {
        rng.gen_range(1..=4) as f64
    } else {
        rng.gen_range(0.05..10.0)
    }
}

/// Small instance: `n <= 12`, `|C| <= 8`, every color present somewhere,
/// quota uniform in `0..=|C|`. Integer weights appear in about a third of
/// the instances to provoke ties.
pub fn small_instance(seed: u64) -> InspectionInstance {
    let mut r = rng(seed);
    let n = r.gen_range(2..=12);
    let p = r.gen_range(0.0..0.5);
    let integral = r.gen_bool(0.3);
    let edges: Vec<Edge> = random_connected(&mut r, n, p)
        .into_iter()
        .map(|(u, v)| Edge::new(u, v, weight(&mut r, integral)))
        .collect();
    let c = r.gen_range(1..=8usize);
    let q = r.gen_range(0.1..0.4);
    let mut colors: Vec<Vec<Color>> = (0..n)
        .map(|_| (0..c as Color).filter(|_| r.gen_bool(q)).collect())
        .collect();
    for col in 0..c as Color {
        if !colors.iter().any(|s| s.contains(&col)) {
            colors[r.gen_range(0..n)].push(col);
        }
    }
    let start = r.gen_range(0..n);
    let quota = r.gen_range(0..=c);
    InspectionInstance::new(n, edges, colors, c, start, quota, None).unwrap()
}

/// Normalized copy of `inst` asking for `quota` original colors.
pub fn normalized_at(inst: &InspectionInstance, quota: usize) -> InspectionInstance {
    let norm = inst.normalize().unwrap();
    norm.instance
        .with_quota(quota.saturating_sub(norm.start_colors.len()))
        .unwrap()
}

/// Colorless graph with `n <= 10` vertices and a handful of chords.
pub fn merge_graph(seed: u64) -> InspectionInstance {
    let mut r = rng(seed);
    let n = r.gen_range(3..=10);
    let mut pairs = random_connected(&mut r, n, 0.0);
    let extra = r.gen_range(0..=n);
    for _ in 0..extra {
        let u = r.gen_range(0..n);
        let v = r.gen_range(0..n);
        if u != v && !pairs.contains(&(u.min(v), u.max(v))) {
            pairs.push((u.min(v), u.max(v)));
        }
    }
    let integral = r.gen_bool(0.3);
    let edges: Vec<Edge> = pairs
        .into_iter()
        .map(|(u, v)| Edge::new(u, v, weight(&mut r, integral)))
        .collect();
    InspectionInstance::new(n, edges, vec![vec![]; n], 0, 0, 0, None).unwrap()
}

/// Closed walk from `start` through a few random stops, joined by
/// shortest paths.
pub fn random_closed_walk(
    inst: &InspectionInstance,
    mc: &MetricClosure,
    start: VertexId,
    r: &mut ChaCha8Rng,
) -> Walk {
    let stops = r.gen_range(1..=4);
    let mut seq = vec![start];
    let mut at = start;
    for i in 0..=stops {
        let next = if i == stops {
            start
        } else {
            r.gen_range(0..inst.vertex_count())
        };
        if next != at {
            seq.extend(mc.path(at, next).into_iter().skip(1));
            at = next;
        }
    }
    Walk::from_vertices(inst, seq).unwrap()
}

/// Star with uncolored center 0, leaves `1..=t` holding one color each and
/// leaf `t + 1` holding all `t` colors; unit weights.
pub fn star(t: usize) -> InspectionInstance {
    let mut colors = vec![vec![]];
    for i in 0..t {
        colors.push(vec![i as Color]);
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

/// Unit-weight random tree on `n` vertices rooted at 0, each leaf with its
/// own color and every color required.
pub fn leaf_colored_tree(seed: u64, n: usize) -> InspectionInstance {
    let mut r = rng(seed);
    let pairs = random_connected(&mut r, n, 0.0);
    let mut degree = vec![0; n];
    for &(u, v) in &pairs {
        degree[u] += 1;
        degree[v] += 1;
    }
    let mut colors = vec![Vec::new(); n];
    let mut next = 0;
    for v in 0..n {
        if degree[v] == 1 {
            colors[v].push(next);
            next += 1;
        }
    }
    let edges = pairs.into_iter().map(|(u, v)| Edge::new(u, v, 1.0));
    InspectionInstance::new(n, edges, colors, next as usize, 0, next as usize, None).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
