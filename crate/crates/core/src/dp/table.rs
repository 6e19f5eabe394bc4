use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use super::DpOptions;
use crate::error::{Error, Result};
use crate::graph::{Color, InspectionInstance, MetricClosure, VertexId};

const NO_ROW: u32 = u32::MAX;

/// Bitmask table `T[v, S]`: the lightest walk from the start to `v` over the
/// metric closure that collects every color of `S`, with `v` contributing at
/// least one color of `S`.
///
/// Only vertices carrying a working color get a column. Rows are grouped by
/// subset cardinality so that each layer is a contiguous block and depends
/// only on earlier blocks; within a layer, subsets appear in increasing mask
/// order. Entries that cannot be realized are `f64::INFINITY`.
#[derive(Debug)]
pub struct DpTable {
    start: VertexId,
    colors: Vec<Color>,
    vertices: Vec<VertexId>,
    masks: Vec<u32>,
    dist: Vec<f64>,
    from_start: Vec<f64>,
    row_of: Vec<u32>,
    layer_start: Vec<usize>,
    subsets: Vec<u32>,
    values: Vec<f64>,
}

impl DpTable {
    /// Fills all layers up to `max_layer` colors.
    pub fn build(
        inst: &InspectionInstance,
        mc: &MetricClosure,
        max_layer: usize,
        opts: &DpOptions,
    ) -> Result<Self> {
        inst.require_normalized()?;
        let colors = inst.collectible_colors();
        let k = colors.len();
        if k > opts.color_cap || k > 31 {
            return Err(Error::TooManyColors {
                colors: k,
                cap: opts.color_cap.min(31),
            });
        }
        if max_layer > k {
            if k == 0 {
                return Err(Error::DegenerateInstance);
            }
            return Err(Error::InfeasibleQuota {
                quota: max_layer,
                available: k,
            });
        }

        let s = inst.start();
        let mut vertices = Vec::new();
        let mut masks = Vec::new();
        for v in 0..inst.vertex_count() {
            let mut mask = 0u32;
            for c in inst.colors(v) {
                if let Ok(bit) = colors.binary_search(c) {
                    mask |= 1 << bit;
                }
            }
            if mask != 0 && v != s {
                vertices.push(v);
                masks.push(mask);
            }
        }
        let m = vertices.len();
        let mut dist = vec![0.0; m * m];
        for (i, &a) in vertices.iter().enumerate() {
            for (j, &b) in vertices.iter().enumerate() {
                dist[i * m + j] = mc.dist(a, b);
            }
        }
        let from_start: Vec<f64> = vertices.iter().map(|&v| mc.dist(s, v)).collect();

        // Subsets of cardinality 1..=max_layer in (layer, mask) order.
        let full = 1usize << k;
        let mut by_layer: Vec<Vec<u32>> = vec![Vec::new(); max_layer + 1];
        for mask in 1..full {
            let pc = (mask as u32).count_ones() as usize;
            if pc <= max_layer {
                by_layer[pc].push(mask as u32);
            }
        }
        let mut row_of = vec![NO_ROW; full];
        let mut layer_start = vec![0usize; max_layer + 2];
        let mut subsets = Vec::new();
        for layer in 1..=max_layer {
            layer_start[layer] = subsets.len();
            for &mask in &by_layer[layer] {
                row_of[mask as usize] = subsets.len() as u32;
                subsets.push(mask);
            }
        }
        layer_start[max_layer + 1] = subsets.len();
        drop(by_layer);

        let cells = subsets.len() * m;
        let mut values: Vec<f64> = Vec::new();
        values.try_reserve_exact(cells).map_err(|_| {
            Error::LimitExceeded(format!(
                "DP table needs {} cells ({} subsets x {} vertices)",
                cells,
                subsets.len(),
                m
            ))
        })?;
        values.resize(cells, f64::INFINITY);

        let mut table = DpTable {
            start: s,
            colors,
            vertices,
            masks,
            dist,
            from_start,
            row_of,
            layer_start,
            subsets,
            values,
        };
        table.fill(max_layer, opts.deadline)?;
        Ok(table)
    }

    fn fill(&mut self, max_layer: usize, deadline: Option<Instant>) -> Result<()> {
        let m = self.vertices.len();
        if m == 0 {
            return Ok(());
        }
        let expired = AtomicBool::new(false);
        let past = |d: Option<Instant>| d.is_some_and(|d| Instant::now() >= d);
        if past(deadline) {
            return Err(Error::Timeout);
        }
        for layer in 1..=max_layer {
            let lo = self.layer_start[layer];
            let hi = self.layer_start[layer + 1];
            let (prev, rest) = self.values.split_at_mut(lo * m);
            let cur = &mut rest[..(hi - lo) * m];
            let prev: &[f64] = prev;
            let subsets = &self.subsets[lo..hi];
            let (masks, dist, from_start, row_of) =
                (&self.masks, &self.dist, &self.from_start, &self.row_of);
            cur.par_chunks_mut(m)
                .zip(subsets.par_iter())
                .with_min_len(64)
                .for_each(|(row, &set)| {
                    if expired.load(Ordering::Relaxed) {
                        return;
                    }
                    for (i, cell) in row.iter_mut().enumerate() {
                        if masks[i] & set == 0 {
                            continue;
                        }
                        let rest = set & !masks[i];
                        if rest == 0 {
                            *cell = from_start[i];
                            continue;
                        }
                        let base = row_of[rest as usize] as usize * m;
                        let before = &prev[base..base + m];
                        let d = &dist[i * m..(i + 1) * m];
                        let mut best = f64::INFINITY;
                        for (t, w) in before.iter().zip(d) {
                            let cand = t + w;
                            if cand < best {
                                best = cand;
                            }
                        }
                        *cell = best;
                    }
                    if past(deadline) {
                        expired.store(true, Ordering::Relaxed);
                    }
                });
            if expired.load(Ordering::Relaxed) {
                return Err(Error::Timeout);
            }
        }
        Ok(())
    }

    /// Working colors; bit `i` of a subset mask stands for `colors()[i]`.
    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    /// Vertices with a column in the table, in increasing id order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// Mask of a color set; colors outside the working set are ignored.
    pub fn mask_of(&self, colors: &[Color]) -> u32 {
        colors
            .iter()
            .filter_map(|c| self.colors.binary_search(c).ok())
            .fold(0, |m, bit| m | (1 << bit))
    }

    /// `T[v, S]`, or infinity for cells outside the table.
    pub fn value(&self, v: VertexId, set: u32) -> f64 {
        let Ok(i) = self.vertices.binary_search(&v) else {
            return f64::INFINITY;
        };
        match self.row_of.get(set as usize) {
            Some(&r) if r != NO_ROW => self.values[r as usize * self.vertices.len() + i],
            _ => f64::INFINITY,
        }
    }

    /// Cheapest closed tour over the closure collecting `layer` colors, as
    /// `(weight, [start, stops.., start])`. Ties resolve to the smallest
    /// mask, then the smallest vertex id.
    pub fn best_closed_sequence(&self, layer: usize) -> Result<(f64, Vec<VertexId>)> {
        if layer == 0 {
            return Ok((0.0, vec![self.start]));
        }
        if layer + 1 >= self.layer_start.len() {
            return Err(Error::InfeasibleQuota {
                quota: layer,
                available: self.layer_start.len().saturating_sub(2),
            });
        }
        let m = self.vertices.len();
        let s = self.start;
        let mut best = (f64::INFINITY, 0usize, 0usize);
        for r in self.layer_start[layer]..self.layer_start[layer + 1] {
            for i in 0..m {
                let total = self.values[r * m + i] + self.from_start[i];
                if total < best.0 {
                    best = (total, r, i);
                }
            }
        }
        if !best.0.is_finite() {
            return Err(Error::InfeasibleQuota {
                quota: layer,
                available: self.colors.len(),
            });
        }
        let (weight, row, col) = best;
        let mut stops = self.reconstruct(self.subsets[row], col);
        stops.insert(0, s);
        stops.push(s);
        Ok((weight, stops))
    }

    /// Stops of the walk realizing `T[vertices[col], set]`, start excluded.
    /// Predecessors are recomputed: the smallest-id column whose candidate
    /// equals the stored value bit for bit, which is the one the fill chose.
    fn reconstruct(&self, mut set: u32, mut col: usize) -> Vec<VertexId> {
        let m = self.vertices.len();
        let mut rev = vec![self.vertices[col]];
        loop {
            let rest = set & !self.masks[col];
            if rest == 0 {
                break;
            }
            let target = self.values[self.row_of[set as usize] as usize * m + col];
            let base = self.row_of[rest as usize] as usize * m;
            let prev = (0..m)
                .find(|&u| self.values[base + u] + self.dist[col * m + u] == target)
                .expect("table entry without a matching predecessor");
            rev.push(self.vertices[prev]);
            set = rest;
            col = prev;
        }
        rev.reverse();
        rev
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    #[test]
    fn layered_rows_cover_small_subsets_only() {
        // Path 0-1-2-3, colors {0} at 1, {1} at 2, {2} at 3.
        let inst = InspectionInstance::new(
            4,
            [
                Edge::new(0, 1, 1.0),
                Edge::new(1, 2, 1.0),
                Edge::new(2, 3, 1.0),
            ],
            vec![vec![], vec![0], vec![1], vec![2]],
            3,
            0,
            2,
            None,
        )
        .unwrap();
        let mc = MetricClosure::new(&inst).unwrap();
        let table = DpTable::build(&inst, &mc, 2, &DpOptions::default()).unwrap();
        assert_eq!(table.subsets.len(), 3 + 3);
        assert_eq!(table.value(1, 0b001), 1.0);
        assert_eq!(table.value(2, 0b011), 2.0);
        assert_eq!(table.value(1, 0b011), 3.0);
        // Vertex 2 contributes nothing to {0}.
        assert!(table.value(2, 0b001).is_infinite());
        assert!(table.value(3, 0b111).is_infinite());
        let (w, seq) = table.best_closed_sequence(2).unwrap();
        assert_eq!(w, 4.0);
        // Both orders weigh 4; ending at the smaller id wins the tie.
        assert_eq!(seq, vec![0, 2, 1, 0]);
    }
}
