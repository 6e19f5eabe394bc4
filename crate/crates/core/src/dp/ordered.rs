use std::collections::BTreeSet;

use super::{solve_dp_with, DpOptions};
use crate::error::{Error, Result};
use crate::graph::{expand_closure_walk, Color, InspectionInstance, MetricClosure, VertexId, Walk};

/// Lightest closed walk that collects the colors of `order` one after another
/// in exactly that sequence, in `O(k * n^2)`.
///
/// `D[v, i]` is the lightest walk ending at `v` that has collected
/// `order[..=i]` with `v` carrying `order[i]`; `T[v, i]` additionally allows a
/// final move to any vertex.
pub fn solve_fixed_order(
    inst: &InspectionInstance,
    mc: &MetricClosure,
    order: &[Color],
) -> Result<Walk> {
    inst.require_normalized()?;
    let n = inst.vertex_count();
    let s = inst.start();
    let mut seen = BTreeSet::new();
    for &c in order {
        if !seen.insert(c) {
            return Err(Error::InvalidInstance(format!(
                "color {c} repeats in the order"
            )));
        }
        if c as usize >= inst.num_colors() {
            return Err(Error::InvalidId {
                id: c as usize,
                bound: inst.num_colors(),
            });
        }
    }
    if order.is_empty() {
        return Ok(Walk::trivial(inst, s));
    }
    let k = order.len();

    // t_prev holds T[., i-1]; T[., -1] is the distance from the start.
    let mut t_prev: Vec<f64> = mc.row(s).to_vec();
    let mut d_arg = vec![vec![usize::MAX; n]; k];
    let mut t_arg = vec![vec![usize::MAX; n]; k];
    let mut d_cur = vec![f64::INFINITY; n];
    for (i, &c) in order.iter().enumerate() {
        for v in 0..n {
            d_cur[v] = f64::INFINITY;
            if inst.colors(v).binary_search(&c).is_err() {
                continue;
            }
            let row = mc.row(v);
            let mut best = (f64::INFINITY, usize::MAX);
            for u in 0..n {
                let cand = t_prev[u] + row[u];
                if cand < best.0 {
                    best = (cand, u);
                }
            }
            d_cur[v] = best.0;
            d_arg[i][v] = best.1;
        }
        if d_cur.iter().all(|d| d.is_infinite()) {
            return Err(Error::InfeasibleQuota {
                quota: k,
                available: i,
            });
        }
        for v in 0..n {
            let row = mc.row(v);
            let mut best = (f64::INFINITY, usize::MAX);
            for u in 0..n {
                let cand = d_cur[u] + row[u];
                if cand < best.0 {
                    best = (cand, u);
                }
            }
            t_prev[v] = best.0;
            t_arg[i][v] = best.1;
        }
    }

    // T[s, k-1] closes the tour; walk the argmins back.
    let mut rev: Vec<VertexId> = vec![s];
    let mut v = s;
    for i in (0..k).rev() {
        let u = t_arg[i][v];
        rev.push(u);
        let w = d_arg[i][u];
        rev.push(w);
        v = w;
    }
    rev.push(s);
    rev.reverse();
    expand_closure_walk(inst, &rev, mc)
}

/// Solves each bucket exactly (collecting all of its colors) and
/// concatenates the tours in bucket order. The buckets must partition the
/// colors carried by vertices other than the start.
pub fn solve_bucketed(
    inst: &InspectionInstance,
    mc: &MetricClosure,
    buckets: &[Vec<Color>],
    opts: &DpOptions,
) -> Result<Walk> {
    inst.require_normalized()?;
    let working: BTreeSet<Color> = inst.collectible_colors().into_iter().collect();
    let mut covered = BTreeSet::new();
    for b in buckets {
        for &c in b {
            if !working.contains(&c) {
                return Err(Error::InvalidBuckets(format!(
                    "color {c} is not collectible"
                )));
            }
            if !covered.insert(c) {
                return Err(Error::InvalidBuckets(format!(
                    "color {c} is in two buckets"
                )));
            }
        }
    }
    if covered.len() != working.len() {
        return Err(Error::InvalidBuckets(format!(
            "{} of {} colors assigned",
            covered.len(),
            working.len()
        )));
    }
    let mut walk = Walk::trivial(inst, inst.start());
    for b in buckets {
        let keep: BTreeSet<Color> = b.iter().copied().collect();
        let part = inst.restricted_to(&keep, keep.len())?;
        let sol = solve_dp_with(&part, mc, opts)?;
        let piece = Walk::from_vertices(inst, sol.walk.vertices)?;
        walk.concat(&piece);
    }
    Ok(walk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::solve_dp;
    use crate::graph::Edge;

    fn path_instance() -> InspectionInstance {
        // 0(s) - 1{0} - 2{1} - 3{2}
        InspectionInstance::new(
            4,
            [
                Edge::new(0, 1, 1.0),
                Edge::new(1, 2, 2.0),
                Edge::new(2, 3, 3.0),
            ],
            vec![vec![], vec![0], vec![1], vec![2]],
            3,
            0,
            3,
            None,
        )
        .unwrap()
    }

    #[test]
    fn single_color_is_nearest_holder_twice() {
        let inst = path_instance();
        let mc = MetricClosure::new(&inst).unwrap();
        for c in 0..3u32 {
            let walk = solve_fixed_order(&inst, &mc, &[c]).unwrap();
            let nearest = (0..4)
                .filter(|&v| inst.colors(v).contains(&c))
                .map(|v| mc.dist(0, v))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(walk.weight, 2.0 * nearest);
            assert!(walk.collected.contains(&c));
        }
    }

    #[test]
    fn order_matters_and_bounds_optimum() {
        let inst = path_instance();
        let mc = MetricClosure::new(&inst).unwrap();
        let opt = solve_dp(&inst, &mc).unwrap().weight;
        let forward = solve_fixed_order(&inst, &mc, &[0, 1, 2]).unwrap();
        assert_eq!(forward.weight, opt);
        // Collecting 2 before 0 forces 0 -> 3 -> 1 -> 2 -> 0.
        let zigzag = solve_fixed_order(&inst, &mc, &[2, 0, 1]).unwrap();
        assert_eq!(zigzag.weight, 6.0 + 5.0 + 2.0 + 3.0);
        assert!(zigzag.weight >= opt);
        zigzag.validate(&inst, 0).unwrap();
    }

    #[test]
    fn bucketed_concatenates_parts() {
        let inst = path_instance();
        let mc = MetricClosure::new(&inst).unwrap();
        let walk =
            solve_bucketed(&inst, &mc, &[vec![0], vec![1, 2]], &DpOptions::default()).unwrap();
        assert_eq!(walk.weight, 2.0 + 12.0);
        assert_eq!(walk.collected, vec![0, 1, 2]);
        walk.validate(&inst, 0).unwrap();
    }

    #[test]
    fn bucket_errors() {
        let inst = path_instance();
        let mc = MetricClosure::new(&inst).unwrap();
        let opts = DpOptions::default();
        for bad in [
            vec![vec![0], vec![1]],
            vec![vec![0, 1], vec![1, 2]],
            vec![vec![0, 1, 2, 7]],
        ] {
            assert!(matches!(
                solve_bucketed(&inst, &mc, &bad, &opts),
                Err(Error::InvalidBuckets(_))
            ));
        }
    }
}
