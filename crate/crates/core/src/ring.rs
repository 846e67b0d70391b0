use alloc::vec::Vec;

use crate::error::{CoreError, CoreResult};
use crate::{NeuronId, Step};

/// Sorted, duplicate-free list of spiking neuron IDs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpikeArray {
    ids: Vec<NeuronId>,
}

impl SpikeArray {
    pub fn from_unsorted(mut ids: Vec<NeuronId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Self { ids }
    }

    pub fn ids(&self) -> &[NeuronId] {
        &self.ids
    }

    pub fn count(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn into_vec(self) -> Vec<NeuronId> {
        self.ids
    }
}

/// `d` spike buffers indexed by step modulo `d`. A spike pushed for step `t`
/// is returned by [`SpikeRing::take_due`] at step `t + d`.
#[derive(Debug, Clone)]
pub struct SpikeRing {
    delay: u32,
    buffers: Vec<Vec<NeuronId>>,
}

impl SpikeRing {
    pub fn new(delay: u32) -> CoreResult<Self> {
        if delay == 0 {
            return Err(CoreError::InvalidParams("delay must be at least one step"));
        }
        Ok(Self { delay, buffers: (0..delay).map(|_| Vec::new()).collect() })
    }

    pub fn delay(&self) -> u32 {
        self.delay
    }

    #[inline]
    fn slot(&self, t: Step) -> usize {
        (t % self.delay) as usize
    }

    /// Records a spike fired at step `t`.
    #[inline]
    pub fn push(&mut self, t: Step, id: NeuronId) {
        let s = self.slot(t);
        self.buffers[s].push(id);
    }

    pub fn extend(&mut self, t: Step, ids: &[NeuronId]) {
        let s = self.slot(t);
        self.buffers[s].extend_from_slice(ids);
    }

    /// Number of raw (not yet deduplicated) entries recorded for step `t`.
    pub fn pending(&self, t: Step) -> usize {
        self.buffers[self.slot(t)].len()
    }

    /// Removes and returns the spikes due at step `t`, i.e. those fired at
    /// `t - d`, sorted and deduplicated. Must be called at the start of step
    /// `t`, before spikes of step `t` are pushed into the same slot.
    pub fn take_due(&mut self, t: Step) -> SpikeArray {
        let s = self.slot(t);
        let raw = core::mem::take(&mut self.buffers[s]);
        SpikeArray::from_unsorted(raw)
    }
}
