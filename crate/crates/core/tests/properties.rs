mod common;

use std::collections::BTreeSet;

use gi_core::dp::solve_dp;
use gi_core::graph::{Color, MetricClosure, Walk, WalkMultigraph};
use gi_core::ilp::{assignment_from_walk, build_model, minimal_walk, FEAS_TOL};
use gi_core::io::{parse_instance, write_instance};
use gi_core::merge::{greedy_merge, MergeInput};
use gi_core::oracle::brute_force_gi;
use gi_core::reduction::{greedy_md, ordered_part, reduce, ReductionMethod};
use proptest::prelude::*;
use rand::Rng;

use common::*;

fn pool(n: usize) -> Vec<Color> {
    (0..n as Color).collect()
}

/// Points in the unit cube, one per color.
fn points(seed: u64, n: usize) -> Vec<[f64; 3]> {
    let mut r = rng(seed);
    (0..n).map(|_| [r.gen(), r.gen(), r.gen()]).collect()
}

fn euclid(p: &[[f64; 3]], a: Color, b: Color) -> f64 {
    let (x, y) = (p[a as usize], p[b as usize]);
    ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dp_agrees_with_enumeration(seed in any::<u64>()) {
        let inst = small_instance(seed);
        let brute = brute_force_gi(&inst, &MetricClosure::new(&inst).unwrap()).unwrap();
        let norm = normalized_at(&inst, inst.quota());
        let walk = solve_dp(&norm, &MetricClosure::new(&norm).unwrap()).unwrap();
        prop_assert!(close(walk.weight, brute.weight, 1e-9));
        walk.validate(&norm, norm.start()).unwrap();
        prop_assert!(walk.collected.len() >= norm.quota());
    }

    #[test]
    fn dp_optimum_grows_with_quota(seed in any::<u64>()) {
        let inst = small_instance(seed);
        let mut last = 0.0;
        for q in 0..=inst.num_colors() {
            let norm = normalized_at(&inst, q);
            let w = solve_dp(&norm, &MetricClosure::new(&norm).unwrap()).unwrap().weight;
            prop_assert!(w + 1e-9 >= last);
            last = w;
        }
    }

    #[test]
    fn random_walks_satisfy_the_model(seed in any::<u64>()) {
        let base = small_instance(seed);
        let norm = normalized_at(&base, 0);
        let mc = MetricClosure::new(&norm).unwrap();
        let mut r = rng(seed);
        let walk = random_closed_walk(&norm, &mc, norm.start(), &mut r);
        prop_assume!(walk.edge_count() > 0);
        let walk = minimal_walk(&norm, &walk).unwrap();
        prop_assert!(walk.edge_count() <= 2 * norm.vertex_count() - 2);
        let at = norm.with_quota(walk.collected.len()).unwrap();
        let model = build_model(&at).unwrap();
        let values = assignment_from_walk(&model, &walk).unwrap();
        prop_assert!(model.check(&values, FEAS_TOL).is_ok());
        prop_assert!(close(model.objective(&values), walk.weight, 1e-9));
    }

    #[test]
    fn greedy_merge_is_spanning_and_closed(seed in any::<u64>()) {
        let inst = merge_graph(seed);
        let mc = MetricClosure::new(&inst).unwrap();
        let mut r = rng(seed);
        let count = r.gen_range(1..=4);
        let walks: Vec<Walk> = (0..count).map(|_| random_closed_walk(&inst, &mc, 0, &mut r)).collect();
        let input = MergeInput::new(&inst, walks).unwrap();
        let merged = greedy_merge(&inst, &input).unwrap();
        merged.validate(&inst, 0).unwrap();
        let seen: BTreeSet<_> = merged.vertices.iter().copied().collect();
        prop_assert_eq!(seen, input.vertices());
        let g = WalkMultigraph::from_walk(&inst, &merged).unwrap();
        for ((u, v), e) in g.edges() {
            prop_assert!(e.mult <= input.union.multiplicity(u, v).min(3));
        }
        prop_assert!(g.is_empty() || g.is_eulerian());
    }

    #[test]
    fn reductions_pick_k_distinct_new_colors(
        seed in any::<u64>(),
        n in 2usize..60,
        start in 0usize..4,
        k_frac in 0.0f64..=1.0,
    ) {
        let colors = pool(n);
        let col0: Vec<Color> = (0..start.min(n - 1) as Color).collect();
        let k = ((n - col0.len()) as f64 * k_frac) as usize;
        let p = points(seed, n);
        for m in [ReductionMethod::Rand, ReductionMethod::Greedy, ReductionMethod::Outlier, ReductionMethod::Metric] {
            let out = reduce(m, &colors, &col0, Some(&p), k, 1.5, seed).unwrap().colors;
            prop_assert_eq!(out.len(), k);
            let set: BTreeSet<_> = out.iter().collect();
            prop_assert_eq!(set.len(), k);
            prop_assert!(out.iter().all(|c| !col0.contains(c) && (*c as usize) < n));
        }
    }

    #[test]
    fn greedy_dispersal_replays(seed in any::<u64>(), n in 2usize..40, start in 0usize..3) {
        let colors = pool(n);
        let col0: Vec<Color> = (0..start.min(n - 1) as Color).collect();
        let p = points(seed, n);
        let f = |a: Color, b: Color| euclid(&p, a, b);
        let k = (n - col0.len()).min(8);
        let got = greedy_md(&colors, &col0, &f, k).unwrap().colors;
        // Farthest-first, rebuilt from scratch at each step.
        let mut chosen: Vec<Color> = col0.clone();
        let mut expect = Vec::new();
        if chosen.is_empty() {
            chosen.push(0);
            expect.push(0);
        }
        while expect.len() < k {
            let mut best: Option<(f64, Color)> = None;
            for &c in &colors {
                if chosen.contains(&c) {
                    continue;
                }
                let d = chosen.iter().map(|&s| f(c, s)).fold(f64::INFINITY, f64::min);
                if best.is_none_or(|(bd, _)| d > bd) {
                    best = Some((d, c));
                }
            }
            let c = best.unwrap().1;
            chosen.push(c);
            expect.push(c);
        }
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn ordered_parts_cover_in_order(n in 0usize..50, parts in 1usize..8) {
        prop_assume!(parts <= n.max(1));
        let colors = pool(n);
        let out = ordered_part(&colors, parts).unwrap();
        prop_assert_eq!(out.len(), parts);
        let flat: Vec<Color> = out.iter().flatten().copied().collect();
        prop_assert_eq!(flat, colors);
        let sizes: Vec<usize> = out.iter().map(Vec::len).collect();
        prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1] && w[0] - w[1] <= 1));
    }

    #[test]
    fn instance_text_round_trips(seed in any::<u64>()) {
        let inst = small_instance(seed);
        let text = write_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(write_instance(&back), text);
        prop_assert_eq!(back.quota(), inst.quota());
        prop_assert_eq!(back.start(), inst.start());
    }
}
