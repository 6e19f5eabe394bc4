//! Color reduction (choosing a representative subset of colors) and color
//! partitioning, plus the two orders in which they combine.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Color, InspectionInstance};

/// Lloyd iterations allowed in [`metric_md`].
pub const KMEANS_MAX_ITERS: usize = 100;
/// Largest centroid shift at which k-means is considered converged.
pub const KMEANS_TOL: f64 = 1e-6;

/// Dissimilarity between two colors. Must be symmetric and zero on equal
/// colors.
pub trait Similarity {
    fn dist(&self, a: Color, b: Color) -> f64;
}

impl<F: Fn(Color, Color) -> f64> Similarity for F {
    fn dist(&self, a: Color, b: Color) -> f64 {
        self(a, b)
    }
}

/// Euclidean distance between color positions.
#[derive(Clone, Copy, Debug)]
pub struct Euclidean<'a>(pub &'a [[f64; 3]]);

impl Similarity for Euclidean<'_> {
    fn dist(&self, a: Color, b: Color) -> f64 {
        euclid(&self.0[a as usize], &self.0[b as usize])
    }
}

fn euclid(p: &[f64; 3], q: &[f64; 3]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionMethod {
    Rand,
    Greedy,
    Outlier,
    Metric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionMethod {
    Ordered,
    Geometric,
}

/// Whether colors are partitioned before or after reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionMode {
    Before,
    After,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionResult {
    /// Selected colors in selection order.
    pub colors: Vec<Color>,
    pub method: ReductionMethod,
    pub seed: Option<u64>,
}

fn pool(colors: &[Color], col0: &[Color]) -> Vec<Color> {
    let skip: BTreeSet<Color> = col0.iter().copied().collect();
    let set: BTreeSet<Color> = colors
        .iter()
        .copied()
        .filter(|c| !skip.contains(c))
        .collect();
    set.into_iter().collect()
}

fn check_k(k: usize, available: usize) -> Result<()> {
    if k > available {
        Err(Error::KTooLarge { k, available })
    } else {
        Ok(())
    }
}

/// `k` colors drawn uniformly without replacement from `colors \ col0`.
pub fn rand_md(colors: &[Color], col0: &[Color], k: usize, seed: u64) -> Result<ReductionResult> {
    let pool = pool(colors, col0);
    check_k(k, pool.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = sample(&mut rng, pool.len(), k)
        .into_iter()
        .map(|i| pool[i])
        .collect();
    Ok(ReductionResult {
        colors: picked,
        method: ReductionMethod::Rand,
        seed: Some(seed),
    })
}

/// Maximum dispersal: starting from `col0`, repeatedly add the color whose
/// nearest selected color is farthest away, until `k` new colors are in.
/// Ties go to the smallest color id. With an empty `col0` the smallest
/// available color seeds the selection and counts towards `k`.
pub fn greedy_md(
    colors: &[Color],
    col0: &[Color],
    f: &dyn Similarity,
    k: usize,
) -> Result<ReductionResult> {
    let pool = pool(colors, col0);
    check_k(k, pool.len())?;
    let mut picked = Vec::with_capacity(k);
    if k == 0 {
        return Ok(greedy_result(picked));
    }
    let seeds: Vec<Color> = if col0.is_empty() {
        let first = *pool.first().ok_or(Error::EmptyInitNoFallback)?;
        picked.push(first);
        vec![first]
    } else {
        col0.to_vec()
    };
    // Distance from every pool color to its nearest selected color.
    let mut nearest: Vec<f64> = pool
        .iter()
        .map(|&c| {
            seeds
                .iter()
                .map(|&s| f.dist(c, s))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mut taken = vec![false; pool.len()];
    if col0.is_empty() {
        taken[0] = true;
    }
    while picked.len() < k {
        let mut best: Option<usize> = None;
        for i in 0..pool.len() {
            if !taken[i] && best.is_none_or(|b| nearest[i] > nearest[b]) {
                best = Some(i);
            }
        }
        let i = best.expect("k checked against the pool");
        taken[i] = true;
        picked.push(pool[i]);
        for j in 0..pool.len() {
            nearest[j] = nearest[j].min(f.dist(pool[j], pool[i]));
        }
    }
    Ok(greedy_result(picked))
}

fn greedy_result(colors: Vec<Color>) -> ReductionResult {
    ReductionResult {
        colors,
        method: ReductionMethod::Greedy,
        seed: None,
    }
}

/// Largest distance from any color of `colors` to its nearest color in
/// `selected ∪ col0`.
pub fn dispersal_radius(
    colors: &[Color],
    col0: &[Color],
    selected: &[Color],
    f: &dyn Similarity,
) -> f64 {
    colors
        .iter()
        .map(|&c| {
            col0.iter()
                .chain(selected)
                .map(|&s| f.dist(c, s))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn nearest_rep(c: Color, reps: &[Color], f: &dyn Similarity) -> usize {
    let mut best = 0;
    for (i, &r) in reps.iter().enumerate().skip(1) {
        if f.dist(c, r) < f.dist(c, reps[best]) {
            best = i;
        }
    }
    best
}

/// Greedy selection of `floor(r * k)` representatives (at most the whole
/// pool), each color clustered
/// to its nearest representative, and the representatives of the `k`
/// largest clusters returned. Size ties keep greedy selection order.
pub fn outlier_md(
    colors: &[Color],
    col0: &[Color],
    f: &dyn Similarity,
    k: usize,
    r: f64,
) -> Result<ReductionResult> {
    if !r.is_finite() || r < 1.0 {
        return Err(Error::InvalidConfig(format!(
            "outlier ratio {r} must be at least 1"
        )));
    }
    check_k(k, pool(colors, col0).len())?;
    let m = ((r * k as f64).floor() as usize).min(pool(colors, col0).len());
    let reps = greedy_md(colors, col0, f, m)?.colors;
    let mut result = ReductionResult {
        colors: Vec::with_capacity(k),
        method: ReductionMethod::Outlier,
        seed: None,
    };
    if k == 0 {
        return Ok(result);
    }
    let mut clusters: Vec<BTreeSet<Color>> = reps.iter().map(|&c| BTreeSet::from([c])).collect();
    let all: BTreeSet<Color> = colors.iter().copied().collect();
    for c in all {
        clusters[nearest_rep(c, &reps, f)].insert(c);
    }
    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(clusters[i].len()));
    result.colors = order[..k].iter().map(|&i| reps[i]).collect();
    Ok(result)
}

/// Greedy seeds refined by k-means over the positions of `colors \ col0`;
/// for each final centroid the nearest color not yet chosen is returned.
pub fn metric_md(
    colors: &[Color],
    col0: &[Color],
    positions: Option<&[[f64; 3]]>,
    k: usize,
) -> Result<ReductionResult> {
    let positions = positions.ok_or(Error::NoEmbedding)?;
    let f = Euclidean(positions);
    let seeds = greedy_md(colors, col0, &f, k)?.colors;
    if k == 0 {
        return Ok(ReductionResult {
            colors: seeds,
            method: ReductionMethod::Metric,
            seed: None,
        });
    }
    let pool = pool(colors, col0);
    let points: Vec<[f64; 3]> = pool.iter().map(|&c| positions[c as usize]).collect();
    let mut centroids: Vec<[f64; 3]> = seeds.iter().map(|&c| positions[c as usize]).collect();

    for _ in 0..KMEANS_MAX_ITERS {
        let mut sums = vec![[0.0; 3]; k];
        let mut counts = vec![0usize; k];
        for p in &points {
            let mut best = 0;
            for j in 1..k {
                if euclid(p, &centroids[j]) < euclid(p, &centroids[best]) {
                    best = j;
                }
            }
            for d in 0..3 {
                sums[best][d] += p[d];
            }
            counts[best] += 1;
        }
        let mut shift: f64 = 0.0;
        for j in 0..k {
            if counts[j] == 0 {
                continue;
            }
            let next = sums[j].map(|s| s / counts[j] as f64);
            shift = shift.max(euclid(&next, &centroids[j]));
            centroids[j] = next;
        }
        if shift < KMEANS_TOL {
            break;
        }
    }

    let mut taken = vec![false; pool.len()];
    let mut picked = Vec::with_capacity(k);
    for centroid in &centroids {
        let mut best: Option<usize> = None;
        for i in 0..pool.len() {
            if taken[i] {
                continue;
            }
            if best.is_none_or(|b| euclid(&points[i], centroid) < euclid(&points[b], centroid)) {
                best = Some(i);
            }
        }
        let i = best.expect("k checked against the pool");
        taken[i] = true;
        picked.push(pool[i]);
    }
    Ok(ReductionResult {
        colors: picked,
        method: ReductionMethod::Metric,
        seed: None,
    })
}

/// Splits an ordered color list into `parts` contiguous chunks whose sizes
/// differ by at most one, larger chunks first.
pub fn ordered_part(colors: &[Color], parts: usize) -> Result<Vec<Vec<Color>>> {
    if parts == 0 {
        return Err(Error::InvalidConfig(
            "partition count must be positive".into(),
        ));
    }
    let base = colors.len() / parts;
    let extra = colors.len() % parts;
    let mut out = Vec::with_capacity(parts);
    let mut at = 0;
    for i in 0..parts {
        let len = base + usize::from(i < extra);
        out.push(colors[at..at + len].to_vec());
        at += len;
    }
    Ok(out)
}

/// `parts` greedy representatives, each color of `colors \ col0` joining its
/// nearest one (ties to the earlier representative). Parts are sorted.
pub fn geometric_part(
    colors: &[Color],
    col0: &[Color],
    f: &dyn Similarity,
    parts: usize,
) -> Result<Vec<Vec<Color>>> {
    if parts == 0 {
        return Err(Error::InvalidConfig(
            "partition count must be positive".into(),
        ));
    }
    let reps = greedy_md(colors, col0, f, parts)?.colors;
    let mut out = vec![Vec::new(); parts];
    for c in pool(colors, col0) {
        out[nearest_rep(c, &reps, f)].push(c);
    }
    Ok(out)
}

/// Parameters of [`reduce_then_partition`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionConfig {
    pub method: ReductionMethod,
    /// Colors kept per part.
    pub k: usize,
    pub parts: usize,
    pub partition: PartitionMethod,
    pub mode: PartitionMode,
    /// Oversampling ratio for the outlier method.
    pub outlier_ratio: f64,
    pub seed: u64,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        ReductionConfig {
            method: ReductionMethod::Greedy,
            k: 10,
            parts: 1,
            partition: PartitionMethod::Ordered,
            mode: PartitionMode::After,
            outlier_ratio: 1.5,
            seed: 0,
        }
    }
}

/// One reduced sub-instance.
#[derive(Clone, Debug)]
pub struct ReducedPart {
    pub colors: Vec<Color>,
    pub instance: InspectionInstance,
}

/// Applies one reduction method. Random draws use `seed`.
pub fn reduce(
    method: ReductionMethod,
    colors: &[Color],
    col0: &[Color],
    positions: Option<&[[f64; 3]]>,
    k: usize,
    outlier_ratio: f64,
    seed: u64,
) -> Result<ReductionResult> {
    match method {
        ReductionMethod::Rand => rand_md(colors, col0, k, seed),
        ReductionMethod::Greedy => greedy_md(
            colors,
            col0,
            &Euclidean(positions.ok_or(Error::NoEmbedding)?),
            k,
        ),
        ReductionMethod::Outlier => outlier_md(
            colors,
            col0,
            &Euclidean(positions.ok_or(Error::NoEmbedding)?),
            k,
            outlier_ratio,
        ),
        ReductionMethod::Metric => metric_md(colors, col0, positions, k),
    }
}

fn partition(
    method: PartitionMethod,
    colors: &[Color],
    col0: &[Color],
    positions: Option<&[[f64; 3]]>,
    parts: usize,
) -> Result<Vec<Vec<Color>>> {
    match method {
        PartitionMethod::Ordered => ordered_part(&pool(colors, col0), parts),
        PartitionMethod::Geometric => geometric_part(
            colors,
            col0,
            &Euclidean(positions.ok_or(Error::NoEmbedding)?),
            parts,
        ),
    }
}

/// Produces `parts` sub-instances sharing the graph and start. Each keeps
/// only its own colors (the start vertex's colors are dropped, so every
/// part is normalized) and asks for all of them.
///
/// In `After` mode `parts * k` colors are selected and then partitioned; in
/// `Before` mode the colors are partitioned first and each part reduced to
/// `k`.
pub fn reduce_then_partition(
    inst: &InspectionInstance,
    cfg: &ReductionConfig,
) -> Result<Vec<ReducedPart>> {
    let colors = inst.collectible_colors();
    let col0 = inst.colors(inst.start()).to_vec();
    let positions = inst.positions();
    let sets: Vec<Vec<Color>> = match cfg.mode {
        PartitionMode::After => {
            let total = cfg
                .parts
                .checked_mul(cfg.k)
                .ok_or_else(|| Error::InvalidConfig("parts times k overflows".into()))?;
            let mut selected = reduce(
                cfg.method,
                &colors,
                &col0,
                positions,
                total,
                cfg.outlier_ratio,
                cfg.seed,
            )?
            .colors;
            selected.sort_unstable();
            partition(cfg.partition, &selected, &[], positions, cfg.parts)?
        }
        PartitionMode::Before => {
            let groups = partition(cfg.partition, &colors, &col0, positions, cfg.parts)?;
            groups
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let seed = cfg.seed.wrapping_add(i as u64);
                    reduce(
                        cfg.method,
                        g,
                        &col0,
                        positions,
                        cfg.k,
                        cfg.outlier_ratio,
                        seed,
                    )
                    .map(|r| r.colors)
                })
                .collect::<Result<_>>()?
        }
    };
    sets.into_iter()
        .map(|mut set| {
            set.sort_unstable();
            let keep: BTreeSet<Color> = set.iter().copied().collect();
            let instance = inst.restricted_to(&keep, 0)?;
            let quota = instance.collectible_colors().len();
            Ok(ReducedPart {
                colors: set,
                instance: instance.with_quota(quota)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> Vec<[f64; 3]> {
        (0..n).map(|i| [i as f64, 0.0, 0.0]).collect()
    }

    fn blobs() -> Vec<[f64; 3]> {
        // Colors 0..5 near the origin, 5..10 near x = 10, 10 far away.
        let mut p = Vec::new();
        for i in 0..5 {
            p.push([0.1 * i as f64, 0.0, 0.0]);
        }
        for i in 0..5 {
            p.push([10.0 + 0.1 * i as f64, 0.0, 0.0]);
        }
        p.push([100.0, 0.0, 0.0]);
        p
    }

    #[test]
    fn greedy_on_a_line() {
        let pos = line(11);
        let all: Vec<Color> = (0..11).collect();
        let f = Euclidean(&pos);
        assert_eq!(greedy_md(&all, &[0], &f, 1).unwrap().colors, vec![10]);
        assert_eq!(greedy_md(&all, &[0], &f, 2).unwrap().colors, vec![10, 5]);
        assert!(matches!(
            greedy_md(&all, &[0], &f, 11),
            Err(Error::KTooLarge {
                k: 11,
                available: 10
            })
        ));
    }

    #[test]
    fn greedy_fallback_seed() {
        let pos = line(5);
        let f = Euclidean(&pos);
        assert_eq!(
            greedy_md(&[0, 1, 2, 3, 4], &[], &f, 2).unwrap().colors,
            vec![0, 4]
        );
        assert!(matches!(greedy_md(&[], &[], &f, 0), Ok(r) if r.colors.is_empty()));
    }

    #[test]
    fn rand_is_seeded_and_exhaustive() {
        let all: Vec<Color> = (0..8).collect();
        let a = rand_md(&all, &[3], 4, 9).unwrap();
        assert_eq!(a, rand_md(&all, &[3], 4, 9).unwrap());
        assert!(!a.colors.contains(&3));
        let mut full = rand_md(&all, &[3], 7, 1).unwrap().colors;
        full.sort_unstable();
        assert_eq!(full, vec![0, 1, 2, 4, 5, 6, 7]);
    }

    #[test]
    fn outlier_drops_isolated_color() {
        let pos = blobs();
        let all: Vec<Color> = (0..11).collect();
        let f = Euclidean(&pos);
        let greedy = greedy_md(&all, &[], &f, 2).unwrap().colors;
        assert!(greedy.contains(&10));
        let picked = outlier_md(&all, &[], &f, 2, 1.5).unwrap().colors;
        assert!(!picked.contains(&10));
        assert!(picked.iter().any(|&c| c < 5));
        assert!(picked.iter().any(|&c| (5..10).contains(&c)));
        let mut same = outlier_md(&all, &[], &f, 3, 1.0).unwrap().colors;
        let mut reference = greedy_md(&all, &[], &f, 3).unwrap().colors;
        same.sort_unstable();
        reference.sort_unstable();
        assert_eq!(same, reference);
    }

    #[test]
    fn metric_one_per_blob() {
        let mut pos = blobs();
        pos.pop();
        let all: Vec<Color> = (0..10).collect();
        let picked = metric_md(&all, &[], Some(&pos), 2).unwrap().colors;
        assert_eq!(picked.len(), 2);
        assert!(picked.iter().any(|&c| c < 5));
        assert!(picked.iter().any(|&c| c >= 5));
        assert_eq!(metric_md(&[3], &[], Some(&pos), 1).unwrap().colors, vec![3]);
        assert!(matches!(
            metric_md(&all, &[], None, 2),
            Err(Error::NoEmbedding)
        ));
    }

    #[test]
    fn ordered_sizes() {
        let c: Vec<Color> = (0..7).collect();
        let sizes: Vec<usize> = ordered_part(&c, 3).unwrap().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![3, 2, 2]);
        assert_eq!(
            ordered_part(&c[..6], 2).unwrap(),
            vec![vec![0, 1, 2], vec![3, 4, 5]]
        );
        assert_eq!(ordered_part(&c, 1).unwrap(), vec![c.clone()]);
    }

    #[test]
    fn geometric_follows_blobs() {
        let mut pos = blobs();
        pos.pop();
        let all: Vec<Color> = (0..10).collect();
        let parts = geometric_part(&all, &[], &Euclidean(&pos), 2).unwrap();
        assert_eq!(parts, vec![vec![0, 1, 2, 3, 4], vec![5, 6, 7, 8, 9]]);
    }

    #[test]
    fn reduced_instances() {
        use crate::graph::Edge;
        let pos = line(7);
        let inst = InspectionInstance::new(
            4,
            [
                Edge::new(0, 1, 1.0),
                Edge::new(1, 2, 1.0),
                Edge::new(2, 3, 1.0),
            ],
            vec![vec![0], vec![1, 2], vec![3, 4], vec![5, 6]],
            7,
            0,
            4,
            Some(pos),
        )
        .unwrap();
        for mode in [PartitionMode::After, PartitionMode::Before] {
            let cfg = ReductionConfig {
                k: 2,
                parts: 2,
                mode,
                ..ReductionConfig::default()
            };
            let parts = reduce_then_partition(&inst, &cfg).unwrap();
            assert_eq!(parts.len(), 2);
            let mut seen = BTreeSet::new();
            for p in &parts {
                assert_eq!(p.colors.len(), 2);
                assert_eq!(p.instance.quota(), 2);
                assert!(p.instance.is_normalized());
                assert!(!p.colors.contains(&0));
                for c in &p.colors {
                    assert!(seen.insert(*c));
                }
            }
        }
    }
}
