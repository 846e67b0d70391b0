use alloc::vec::Vec;

use super::{Transmission, WorkerState, NEVER};
use crate::adjacency::{AdjacencyList, SENTINEL};
use crate::model::{Delivery, Edge, Model, SpikeTiming};
use crate::partition::Partition;
use crate::pool::{RecordMut, RecordRef};
use crate::{NeuronId, Step};

/// Everything one lane-block visit reads or writes, apart from the neuron
/// pool it delivers into.
struct Visit<'a, 'c, M> {
    model: &'a M,
    adj: &'a AdjacencyList,
    partition: &'a Partition,
    post: &'a [&'a [u32]],
    synapses: &'a mut [&'c mut [u32]],
    last_spike: &'a [Step],
    last_arrival: &'a mut [Step],
    now: Step,
    dt: f32,
}

impl<M: Model> Visit<'_, '_, M> {
    /// Runs the callbacks for entries `[from, to)` of `src`'s row, writing
    /// one delivery per valid entry into `out`. Returns the number of valid
    /// entries.
    #[inline]
    fn block(&mut self, src: NeuronId, from: usize, to: usize, out: &mut [Delivery]) -> usize {
        let width = self.adj.width();
        let row = &self.adj.row(src as usize)[from..to];
        let plastic = !self.last_arrival.is_empty();
        let mut n = 0;
        for (k, &dst) in row.iter().enumerate() {
            if dst == SENTINEL {
                break;
            }
            let slot = src as usize * width + from + k;
            let edge = Edge { src, dst };
            let local = self.partition.global_to_local(dst) as usize;
            let mut syn = RecordMut::new(self.synapses, slot);
            if plastic {
                let post_last = self.last_spike[local];
                let prev = self.last_arrival[slot];
                if post_last != NEVER {
                    if prev != NEVER && post_last > prev {
                        let delta = (post_last - prev) as f32 * self.dt;
                        self.model.on_post_spike(edge, &mut syn, SpikeTiming { now: post_last, delta });
                    }
                    let delta = (self.now - post_last) as f32 * self.dt;
                    self.model.on_pre_spike(edge, &mut syn, SpikeTiming { now: self.now, delta });
                }
                self.last_arrival[slot] = self.now;
            }
            out[k] = self.model.receive_spike(edge, &mut syn, RecordRef::new(self.post, local));
            n += 1;
        }
        n
    }
}

#[inline]
fn add(cols: &mut [&mut [u32]], index: usize, d: Delivery) {
    let cell = &mut cols[d.field as usize][index];
    *cell = (f32::from_bits(*cell) + d.amount).to_bits();
}

/// Adds the staged deliveries whose targets fall in local records
/// `[lo, lo + cols.len())` to `cols`, spike by spike in ascending order.
fn accumulate(
    adj: &AdjacencyList,
    partition: &Partition,
    gid: u32,
    spikes: &[NeuronId],
    stage: &[Delivery],
    lo: u32,
    hi: u32,
    cols: &mut [&mut [u32]],
) {
    if lo >= hi {
        return;
    }
    let width = adj.width();
    let first = partition.local_to_global(gid, lo).unwrap_or(NeuronId::MAX);
    let last = partition.local_to_global(gid, hi - 1).map_or(NeuronId::MAX, |j| j + 1);
    let whole = lo == 0 && hi == partition.owned_count(gid) as u32;
    for (a, &src) in spikes.iter().enumerate() {
        let row = adj.valid_row(src as usize);
        let (b, e) = if whole {
            (0, row.len())
        } else {
            (row.partition_point(|&t| t < first), row.partition_point(|&t| t < last))
        };
        let staged = &stage[a * width..];
        for j in b..e {
            let local = partition.global_to_local(row[j]) - lo;
            add(cols, local as usize, staged[j]);
        }
    }
}

impl<M: Model> WorkerState<M> {
    /// Delivers `spikes` (ascending, unique, all `< N`) over this worker's
    /// synapses. The lane-block grid of `|spikes| x width/lane` blocks is
    /// visited column-major: block `k` covers spike `k % |spikes|`, entries
    /// `(k / |spikes|) * lane ..` of its row. Returns the number of valid
    /// entries visited.
    pub fn transmit_spikes(&mut self, spikes: &[NeuronId]) -> u64 {
        debug_assert!(spikes.windows(2).all(|w| w[0] < w[1]));
        let width = self.adj.width();
        if spikes.is_empty() || width == 0 {
            return 0;
        }
        match self.config.transmission {
            Transmission::Deterministic => self.transmit_staged(spikes),
            mode => self.transmit_direct(spikes, mode == Transmission::RowMajorDirect),
        }
    }

    fn transmit_staged(&mut self, spikes: &[NeuronId]) -> u64 {
        let width = self.adj.width();
        let lane = self.config.lane;
        let s = spikes.len();
        let mut stage = core::mem::take(&mut self.stage);
        // Only slots of valid entries are written and read back.
        if stage.len() < s * width {
            stage.resize(s * width, Delivery::new(0, 0.0));
        }

        let mut delivered = 0u64;
        {
            let post = self.neurons.columns();
            let mut syn = self.synapses.columns_mut();
            let mut visit = Visit {
                model: &self.model,
                adj: &self.adj,
                partition: &self.partition,
                post: &post,
                synapses: &mut syn,
                last_spike: &self.last_spike,
                last_arrival: &mut self.last_arrival,
                now: self.t,
                dt: self.config.dt,
            };
            for k in 0..s * (width / lane) {
                let (a, c) = (k % s, k / s);
                let from = c * lane;
                if self.adj.row(spikes[a] as usize)[from] == SENTINEL {
                    continue;
                }
                let out = &mut stage[a * width + from..a * width + from + lane];
                delivered += visit.block(spikes[a], from, from + lane, out) as u64;
            }
        }

        let tasks = self.config.tasks.max(1).min(self.owned.max(1) as usize);
        if tasks <= 1 {
            let mut cols = self.neurons.columns_mut();
            accumulate(&self.adj, &self.partition, self.gid, spikes, &stage, 0, self.owned, &mut cols);
        } else {
            self.accumulate_split(spikes, &stage, tasks);
        }
        self.stage = stage;
        delivered
    }

    fn accumulate_split(&mut self, spikes: &[NeuronId], stage: &[Delivery], tasks: usize) {
        let owned = self.owned as usize;
        let bounds: Vec<usize> = (0..=tasks).map(|k| k * owned / tasks).collect();
        let chunks = self.neurons.split_mut(&bounds);
        let (adj, partition, gid) = (&self.adj, &self.partition, self.gid);
        let job = |(k, mut cols): (usize, Vec<&mut [u32]>)| {
            accumulate(adj, partition, gid, spikes, stage, bounds[k] as u32, bounds[k + 1] as u32, &mut cols);
        };
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            chunks.into_par_iter().enumerate().for_each(job);
        }
        #[cfg(not(feature = "parallel"))]
        chunks.into_iter().enumerate().for_each(job);
    }

    /// Direct modes read post-synaptic state from a snapshot taken at the
    /// start of transmission, so callbacks see the same values as in the
    /// staged mode; only the summation order differs.
    fn transmit_direct(&mut self, spikes: &[NeuronId], row_major: bool) -> u64 {
        let width = self.adj.width();
        let lane = self.config.lane;
        let s = spikes.len();
        let blocks = width / lane;

        self.snapshot.resize(self.neurons.field_count(), Vec::new());
        for (f, snap) in self.snapshot.iter_mut().enumerate() {
            snap.clear();
            snap.extend_from_slice(self.neurons.column(f));
        }
        let post: Vec<&[u32]> = self.snapshot.iter().map(Vec::as_slice).collect();
        let mut syn = self.synapses.columns_mut();
        let mut cols = self.neurons.columns_mut();
        let mut visit = Visit {
            model: &self.model,
            adj: &self.adj,
            partition: &self.partition,
            post: &post,
            synapses: &mut syn,
            last_spike: &self.last_spike,
            last_arrival: &mut self.last_arrival,
            now: self.t,
            dt: self.config.dt,
        };
        let mut out = alloc::vec![Delivery::new(0, 0.0); lane];
        let mut delivered = 0u64;
        for k in 0..s * blocks {
            let (a, c) = if row_major { (k / blocks, k % blocks) } else { (k % s, k / s) };
            let src = spikes[a];
            let from = c * lane;
            let row = &self.adj.row(src as usize)[from..from + lane];
            if row[0] == SENTINEL {
                continue;
            }
            let n = visit.block(src, from, from + lane, &mut out);
            for (d, &dst) in out[..n].iter().zip(row) {
                add(&mut cols, self.partition.global_to_local(dst) as usize, *d);
            }
            delivered += n as u64;
        }
        delivered
    }
}
