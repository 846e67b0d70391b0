//! Static strided load balancing: neurons are cut into equal-width slices
//! that are dealt to workers round-robin.

use crate::error::{CoreError, CoreResult};
use crate::topology::IdRange;
use crate::NeuronId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Partition {
    neurons: u32,
    workers: u32,
    slice: u32,
}

/// Slice width giving each worker about 256 slices; rounded down to a
/// multiple of 32 when that leaves at least one full lane.
pub fn default_slice_width(neurons: u32, workers: u32) -> u32 {
    let raw = (neurons as u64 / (256 * workers.max(1) as u64)).max(1) as u32;
    if raw >= 32 {
        raw / 32 * 32
    } else {
        raw
    }
}

impl Partition {
    pub fn new(neurons: u32, workers: u32, slice: u32) -> CoreResult<Self> {
        if neurons == 0 || workers == 0 || slice == 0 {
            return Err(CoreError::InvalidParams("neurons, workers and slice width must be at least 1"));
        }
        Ok(Self { neurons, workers, slice })
    }

    pub fn with_default_slices(neurons: u32, workers: u32) -> CoreResult<Self> {
        Self::new(neurons, workers, default_slice_width(neurons, workers))
    }

    /// Everything on one worker.
    pub fn single(neurons: u32) -> CoreResult<Self> {
        Self::new(neurons, 1, neurons.max(1))
    }

    pub fn neurons(&self) -> u32 {
        self.neurons
    }

    pub fn workers(&self) -> u32 {
        self.workers
    }

    pub fn slice_width(&self) -> u32 {
        self.slice
    }

    pub fn slice_count(&self) -> u32 {
        self.neurons.div_ceil(self.slice)
    }

    #[inline]
    pub fn owner(&self, id: NeuronId) -> u32 {
        (id / self.slice) % self.workers
    }

    /// Global ID of the `i`-th neuron owned by `worker`, or `None` once past
    /// the end of the network.
    #[inline]
    pub fn local_to_global(&self, worker: u32, i: u32) -> Option<NeuronId> {
        let j = ((i / self.slice) as u64 * self.workers as u64 + worker as u64) * self.slice as u64
            + (i % self.slice) as u64;
        (j < self.neurons as u64).then_some(j as NeuronId)
    }

    /// Position of `id` among the neurons its owner holds; the inverse of
    /// [`Partition::local_to_global`].
    #[inline]
    pub fn global_to_local(&self, id: NeuronId) -> u32 {
        if self.workers == 1 {
            return id;
        }
        (id / self.slice / self.workers) * self.slice + id % self.slice
    }

    /// Number of IDs below `x` owned by `worker`.
    pub fn owned_below(&self, worker: u32, x: u32) -> u64 {
        let period = self.slice as u64 * self.workers as u64;
        let x = x as u64;
        let full = x / period;
        let rem = x % period;
        let lo = worker as u64 * self.slice as u64;
        full * self.slice as u64 + rem.saturating_sub(lo).min(self.slice as u64)
    }

    pub fn owned_count(&self, worker: u32) -> u64 {
        self.owned_below(worker, self.neurons)
    }

    pub fn owned_in(&self, worker: u32, range: IdRange) -> u64 {
        if range.is_empty() {
            return 0;
        }
        self.owned_below(worker, range.end) - self.owned_below(worker, range.start)
    }

    /// The owned slices of `worker`, in ascending order, clipped to the
    /// network.
    pub fn owned_slices(&self, worker: u32) -> impl Iterator<Item = IdRange> + '_ {
        let first = worker as u64 * self.slice as u64;
        let step = self.slice as u64 * self.workers as u64;
        let n = self.neurons as u64;
        let slice = self.slice as u64;
        (0..)
            .map(move |k: u64| first + k * step)
            .take_while(move |&s| s < n)
            .map(move |s| IdRange::new(s as u32, (s + slice).min(n) as u32))
    }

    /// Owned slices of `worker` intersected with `range`.
    pub fn owned_slices_in(&self, worker: u32, range: IdRange) -> impl Iterator<Item = IdRange> + '_ {
        let period = self.slice as u64 * self.workers as u64;
        let start_cycle = range.start as u64 / period;
        let first = start_cycle * period + worker as u64 * self.slice as u64;
        let slice = self.slice as u64;
        (0..)
            .map(move |k: u64| first + k * period)
            .take_while(move |&s| s < range.end as u64)
            .map(move |s| IdRange::new(s as u32, (s + slice).min(u32::MAX as u64) as u32).intersect(range))
            .filter(|r| !r.is_empty())
    }
}
