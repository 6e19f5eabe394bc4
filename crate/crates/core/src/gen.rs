//! Synthetic instances shaped like the two inspection benchmarks: a random
//! geometric roadmap around an object whose surface carries the colors.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use petgraph::unionfind::UnionFind;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Color, Edge, InspectionInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// 4200 colors, about 183 visible per vertex, short edges.
    CrispLike,
    /// 3204 colors, about 23 visible per vertex, long edges.
    DroneLike,
    /// Points in the unit cube, two colors per vertex on the average three
    /// visible.
    Uniform,
}

/// Calibration targets of a profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileParams {
    pub colors: Option<usize>,
    pub mean_colors_per_vertex: f64,
    pub mean_degree: f64,
    pub mean_edge_weight: f64,
    pub surface: bool,
}

impl Profile {
    pub const ALL: [Profile; 3] = [Profile::CrispLike, Profile::DroneLike, Profile::Uniform];

    pub fn params(self) -> ProfileParams {
        match self {
            Profile::CrispLike => ProfileParams {
                colors: Some(4200),
                mean_colors_per_vertex: 183.39,
                mean_degree: 37.2,
                mean_edge_weight: 0.006971,
                surface: true,
            },
            Profile::DroneLike => ProfileParams {
                colors: Some(3204),
                mean_colors_per_vertex: 22.67,
                mean_degree: 39.6,
                mean_edge_weight: 4.61,
                surface: true,
            },
            Profile::Uniform => ProfileParams {
                colors: None,
                mean_colors_per_vertex: 3.0,
                mean_degree: 6.0,
                mean_edge_weight: 1.0,
                surface: false,
            },
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::CrispLike => "crisp-like",
            Profile::DroneLike => "drone-like",
            Profile::Uniform => "uniform",
        })
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Profile::ALL
            .into_iter()
            .find(|p| p.to_string() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown profile '{s}'")))
    }
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn on_sphere(rng: &mut ChaCha8Rng, radius: f64) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).sqrt();
    [radius * r * phi.cos(), radius * r * phi.sin(), radius * z]
}

fn in_cube(rng: &mut ChaCha8Rng) -> [f64; 3] {
    [rng.gen(), rng.gen(), rng.gen()]
}

/// Deterministic synthetic instance with `n` vertices; vertex 0 is the
/// start and the quota asks for every collectible color.
///
/// Vertices are sampled around a unit sphere (or in the unit cube for the
/// uniform profile) and joined to their nearest pairs until the mean degree
/// is reached; components are then linked by their shortest connecting
/// pairs. A color is visible from a vertex within a radius calibrated on
/// the sample to the profile's mean colors per vertex; on the sphere the
/// vertex must also lie above the color's tangent plane.
pub fn generate_instance(profile: Profile, n: usize, seed: u64) -> Result<InspectionInstance> {
    if n < 2 {
        return Err(Error::InvalidConfig(
            "generated instances need n >= 2".into(),
        ));
    }
    let params = profile.params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_colors = params.colors.unwrap_or(2 * n);

    let vertices: Vec<[f64; 3]> = (0..n)
        .map(|_| {
            if params.surface {
                let r = rng.gen_range(1.2..2.0);
                on_sphere(&mut rng, r)
            } else {
                in_cube(&mut rng)
            }
        })
        .collect();
    let pois: Vec<[f64; 3]> = (0..num_colors)
        .map(|_| {
            if params.surface {
                on_sphere(&mut rng, 1.0)
            } else {
                in_cube(&mut rng)
            }
        })
        .collect();

    // Candidate (vertex, color, distance) pairs.
    let mut visible: Vec<(usize, Color, f64)> = Vec::new();
    for (v, p) in vertices.iter().enumerate() {
        for (c, q) in pois.iter().enumerate() {
            let d = sub(p, q);
            if !params.surface || dot(&d, q) > 0.0 {
                visible.push((v, c as Color, norm(&d)));
            }
        }
    }
    let want = ((params.mean_colors_per_vertex * n as f64).round() as usize).min(visible.len());
    visible.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    let mut colors: Vec<Vec<Color>> = vec![Vec::new(); n];
    for &(v, c, _) in &visible[..want] {
        colors[v].push(c);
    }

    let mut pairs: Vec<(usize, usize, f64)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((i, j, norm(&sub(&vertices[i], &vertices[j]))));
        }
    }
    pairs.sort_by(|a, b| a.2.total_cmp(&b.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let target = ((params.mean_degree * n as f64 / 2.0).round() as usize).clamp(1, pairs.len());
    let mut uf = UnionFind::<usize>::new(n);
    let mut chosen: Vec<(usize, usize, f64)> = Vec::with_capacity(target + n);
    for &(i, j, d) in &pairs[..target] {
        uf.union(i, j);
        chosen.push((i, j, d));
    }
    for &(i, j, d) in &pairs[target..] {
        if uf.union(i, j) {
            chosen.push((i, j, d));
        }
    }
    let mean_len = chosen.iter().map(|e| e.2).sum::<f64>() / chosen.len() as f64;
    let scale = if mean_len > 0.0 {
        params.mean_edge_weight / mean_len
    } else {
        1.0
    };
    let edges: Vec<Edge> = chosen
        .into_iter()
        .map(|(i, j, d)| Edge::new(i, j, d * scale))
        .collect();

    let inst = InspectionInstance::new(n, edges, colors, num_colors, 0, 0, Some(pois))?;
    let quota = inst.collectible_colors().len();
    inst.with_quota(quota)
}
