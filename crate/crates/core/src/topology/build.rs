use alloc::vec::Vec;

use crate::adjacency::{aligned_width, AdjacencyList};
use crate::error::CoreResult;
use crate::rng::{edge_row_stream, philox4x32, u32_threshold, Domain};
use crate::topology::{width_for, ConnectRule, TargetScope, TopologyDescriptor};

/// Rules at or above this probability decide each (source, target) pair with
/// its own keyed draw; sparser rules walk the target range by geometric
/// skipping, which costs O(expected edges) per row.
pub const PAIR_DRAW_MIN_P: f64 = 0.2;

fn pair_draws(seed: u64, rule: &ConnectRule, src: u32, scope: &TargetScope, out: &mut Vec<u32>) {
    let threshold = u32_threshold(rule.p);
    let key = [seed as u32, (seed >> 32) as u32];
    let tag = (rule.key << 4) | Domain::EdgePair as u32;
    scope.for_each_run(rule.dst, |run| {
        let mut block_id = u32::MAX;
        let mut block = [0u32; 4];
        for t in run.start..run.end {
            if t >> 2 != block_id {
                block_id = t >> 2;
                block = philox4x32([src, block_id, tag, 0], key);
            }
            if (block[(t & 3) as usize] as u64) < threshold {
                out.push(t);
            }
        }
    });
}

fn skip_draws(seed: u64, rule: &ConnectRule, src: u32, scope: &TargetScope, out: &mut Vec<u32>) {
    let mut rng = edge_row_stream(seed, rule.key, src);
    let log_q = libm::log1p(-rule.p);
    let end = rule.dst.end as u64;
    let mut t = rule.origin as u64;
    loop {
        let gap = libm::floor(libm::log(rng.next_open_f64()) / log_q);
        t = t.saturating_add(gap as u64);
        if t >= end {
            break;
        }
        let id = t as u32;
        if id >= rule.dst.start && scope.contains(id) {
            out.push(id);
        }
        t += 1;
    }
}

/// Generates the out-edges of `src` under `scope`, ascending. The edge set is
/// a function of (descriptor, seed, src) alone, filtered by the scope.
pub fn generate_row(
    desc: &TopologyDescriptor,
    seed: u64,
    scope: &TargetScope,
    src: u32,
    out: &mut Vec<u32>,
) {
    out.clear();
    let mut contributing = 0;
    for rule in desc.rules() {
        if !rule.src.contains(src) || rule.p <= 0.0 || rule.dst.is_empty() {
            continue;
        }
        let before = out.len();
        if rule.p >= PAIR_DRAW_MIN_P {
            pair_draws(seed, rule, src, scope, out);
        } else {
            skip_draws(seed, rule, src, scope, out);
        }
        if out.len() > before {
            contributing += 1;
        }
    }
    if contributing > 1 {
        out.sort_unstable();
    }
}

/// Fills `row` with the out-edges of `src`; if they do not fit, returns the
/// complete row.
fn fill_row(
    desc: &TopologyDescriptor,
    seed: u64,
    scope: &TargetScope,
    src: u32,
    row: &mut [u32],
    scratch: &mut Vec<u32>,
) -> Option<(u32, Vec<u32>)> {
    generate_row(desc, seed, scope, src, scratch);
    let keep = scratch.len().min(row.len());
    row[..keep].copy_from_slice(&scratch[..keep]);
    (scratch.len() > keep).then(|| (src, scratch.clone()))
}

/// Fills every row of `adj` and returns the rows that did not fit, ascending.
fn fill_all(
    adj: &mut AdjacencyList,
    desc: &TopologyDescriptor,
    seed: u64,
    scope: &TargetScope,
) -> Vec<(u32, Vec<u32>)> {
    let width = adj.width();
    let rows = adj.rows();
    if width == 0 {
        let mut scratch = Vec::new();
        return (0..rows as u32)
            .filter_map(|src| {
                generate_row(desc, seed, scope, src, &mut scratch);
                (!scratch.is_empty()).then(|| (src, scratch.clone()))
            })
            .collect();
    }

    #[cfg(feature = "parallel")]
    let long = {
        use rayon::prelude::*;
        adj.entries_mut()
            .par_chunks_mut(width)
            .enumerate()
            .map_init(Vec::new, |scratch, (src, row)| {
                fill_row(desc, seed, scope, src as u32, row, scratch)
            })
            .flatten_iter()
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let long = {
        let mut scratch = Vec::new();
        adj.entries_mut()
            .chunks_mut(width)
            .enumerate()
            .filter_map(|(src, row)| fill_row(desc, seed, scope, src as u32, row, &mut scratch))
            .collect()
    };
    long
}

fn excess(long: &[(u32, Vec<u32>)], width: usize) -> u64 {
    long.iter().map(|(_, row)| (row.len() - width) as u64).sum()
}

/// Populates an adjacency list of the given width. Edges that do not fit in
/// their row are dropped (largest targets first) and counted.
pub fn build_adjacency(
    desc: &TopologyDescriptor,
    seed: u64,
    scope: &TargetScope,
    width: usize,
) -> CoreResult<(AdjacencyList, u64)> {
    let mut adj = AdjacencyList::new(desc.neurons() as usize, width)?;
    let long = fill_all(&mut adj, desc, seed, scope);
    Ok((adj, excess(&long, width)))
}

/// Like [`build_adjacency`], but when some row exceeds `width` the list is
/// re-padded once to the longest row instead of dropping edges. Returns the
/// number of edges that exceeded the requested width.
pub fn build_adjacency_complete(
    desc: &TopologyDescriptor,
    seed: u64,
    scope: &TargetScope,
    width: usize,
) -> CoreResult<(AdjacencyList, u64)> {
    let mut adj = AdjacencyList::new(desc.neurons() as usize, width)?;
    let long = fill_all(&mut adj, desc, seed, scope);
    let over = excess(&long, width);
    if long.is_empty() {
        return Ok((adj, 0));
    }
    let max = long.iter().map(|(_, row)| row.len()).max().unwrap_or(0);
    let mut grown = AdjacencyList::new(adj.rows(), aligned_width(max))?;
    for i in 0..adj.rows() {
        let n = adj.valid_len(i);
        grown.row_mut(i)[..n].copy_from_slice(&adj.row(i)[..n]);
    }
    drop(adj);
    for (src, row) in &long {
        grown.row_mut(*src as usize)[..row.len()].copy_from_slice(row);
    }
    Ok((grown, over))
}

/// Estimates the width for `scope` and builds the list.
pub fn build_scoped(
    desc: &TopologyDescriptor,
    seed: u64,
    scope: &TargetScope,
) -> CoreResult<(AdjacencyList, u64)> {
    build_adjacency(desc, seed, scope, width_for(desc, scope))
}
