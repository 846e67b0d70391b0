//! One worker's simulation loop.

mod transmit;

use alloc::vec;
use alloc::vec::Vec;

use crate::adjacency::{AdjacencyList, LANE};
use crate::error::{CoreError, CoreResult};
use crate::model::{Delivery, Edge, Model, UpdateCtx};
use crate::partition::Partition;
use crate::pool::{try_alloc_words, FieldPool, RecordMut};
use crate::ring::SpikeRing;
use crate::rng::KeyedRng;
use crate::topology::{build_adjacency, build_adjacency_complete, width_for, TargetScope, TopologyDescriptor};
use crate::{NeuronId, Step};

/// Marks "never" in spike-time bookkeeping.
pub const NEVER: Step = Step::MAX;

/// How spikes are delivered to targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Transmission {
    /// Column-major traversal into a staging buffer, then per-target
    /// accumulation in ascending source order. Bit-reproducible.
    #[default]
    Deterministic,
    /// Column-major traversal applying each lane-block as soon as it is
    /// visited. Per-target summation order depends on row layout.
    ColumnMajorDirect,
    /// Spike by spike, each row front to back.
    RowMajorDirect,
}

/// What [`WorkerState::build`] does with edges beyond the estimated width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Overflow {
    /// Re-pad to the longest row, so the edge set never depends on the
    /// partition.
    #[default]
    Regrow,
    /// Keep the estimated width and drop the excess.
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkerConfig {
    pub seed: u64,
    /// Step length in seconds.
    pub dt: f32,
    /// Synaptic delay in steps.
    pub delay: u32,
    /// Lane-block width in adjacency entries. Must divide the row width.
    pub lane: usize,
    /// Number of target ranges the accumulation phase is split into. Ranges
    /// run on rayon when the `parallel` feature is on.
    pub tasks: usize,
    pub transmission: Transmission,
    pub overflow: Overflow,
}

impl WorkerConfig {
    pub fn new(seed: u64, dt: f32, delay: u32) -> Self {
        Self { seed, dt, delay, lane: LANE, tasks: 1, transmission: Transmission::Deterministic, overflow: Overflow::Regrow }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepStats {
    pub step: Step,
    pub fired: u32,
    pub delivered: u64,
}

/// State of one worker: its owned neurons, the incoming synapses of those
/// neurons (rows for every source in the network) and its delay ring.
pub struct WorkerState<M: Model> {
    model: M,
    config: WorkerConfig,
    partition: Partition,
    gid: u32,
    owned: u32,
    adj: AdjacencyList,
    overflow: u64,
    neurons: FieldPool,
    synapses: FieldPool,
    ring: SpikeRing,
    t: Step,
    /// Last firing step per owned neuron.
    last_spike: Vec<Step>,
    /// Last arrival step per synapse slot; empty unless the model is plastic.
    last_arrival: Vec<Step>,
    outbox: Vec<(Step, Vec<NeuronId>)>,
    fired: Vec<NeuronId>,
    stage: Vec<Delivery>,
    snapshot: Vec<Vec<u32>>,
}

impl<M: Model> WorkerState<M> {
    /// Generates the sub-network owned by `gid` and initializes its state.
    pub fn build(
        model: M,
        desc: &TopologyDescriptor,
        partition: Partition,
        gid: u32,
        config: WorkerConfig,
    ) -> CoreResult<Self> {
        if desc.neurons() != partition.neurons() {
            return Err(CoreError::InvalidParams("partition and descriptor disagree on N"));
        }
        let scope = TargetScope::owned(partition, gid);
        let width = width_for(desc, &scope);
        let (adj, overflow) = match config.overflow {
            Overflow::Regrow => build_adjacency_complete(desc, config.seed, &scope, width)?,
            Overflow::Drop => build_adjacency(desc, config.seed, &scope, width)?,
        };
        let mut state = Self::from_parts(model, partition, gid, adj, config)?;
        state.overflow = overflow;
        Ok(state)
    }

    /// Wraps an existing adjacency list whose targets are all owned by `gid`.
    pub fn from_parts(
        model: M,
        partition: Partition,
        gid: u32,
        adj: AdjacencyList,
        config: WorkerConfig,
    ) -> CoreResult<Self> {
        if gid >= partition.workers() {
            return Err(CoreError::InvalidParams("worker id out of range"));
        }
        if adj.rows() != partition.neurons() as usize {
            return Err(CoreError::RowMismatch { rows: adj.rows(), neurons: partition.neurons() as usize });
        }
        if config.lane == 0 || adj.width() % config.lane != 0 {
            return Err(CoreError::InvalidParams("lane width must divide the adjacency width"));
        }
        if !(config.dt > 0.0) {
            return Err(CoreError::InvalidParams("dt must be positive"));
        }
        let owned = partition.owned_count(gid) as u32;

        let mut neurons = FieldPool::new(model.neuron_fields(), owned as usize)?;
        {
            let mut cols = neurons.columns_mut();
            for i in 0..owned {
                let j = partition.local_to_global(gid, i).expect("owned index in range");
                let mut rng = KeyedRng::for_neuron_init(config.seed, j);
                model.init_neuron(j, &mut RecordMut::new(&mut cols, i as usize), &mut rng);
            }
        }

        let slots = adj.rows() * adj.width();
        let mut synapses = FieldPool::new(model.synapse_fields(), slots)?;
        if synapses.field_count() > 0 {
            let mut cols = synapses.columns_mut();
            for src in 0..adj.rows() {
                for (j, &dst) in adj.valid_row(src).iter().enumerate() {
                    let edge = Edge { src: src as u32, dst };
                    model.init_synapse(edge, &mut RecordMut::new(&mut cols, src * adj.width() + j));
                }
            }
        }
        let last_arrival =
            if model.is_plastic() { try_alloc_words("arrival times", slots, NEVER)? } else { Vec::new() };

        Ok(Self {
            model,
            ring: SpikeRing::new(config.delay)?,
            config,
            partition,
            gid,
            owned,
            adj,
            overflow: 0,
            neurons,
            synapses,
            t: 0,
            last_spike: vec![NEVER; owned as usize],
            last_arrival,
            outbox: Vec::new(),
            fired: Vec::new(),
            stage: Vec::new(),
            snapshot: Vec::new(),
        })
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn config(&self) -> &WorkerConfig {
        &self.config
    }

    pub fn set_transmission(&mut self, mode: Transmission) {
        self.config.transmission = mode;
    }

    pub fn set_tasks(&mut self, tasks: usize) {
        self.config.tasks = tasks.max(1);
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn gid(&self) -> u32 {
        self.gid
    }

    pub fn owned_count(&self) -> u32 {
        self.owned
    }

    pub fn adjacency(&self) -> &AdjacencyList {
        &self.adj
    }

    /// Edges that did not fit the estimated width (dropped or accommodated by
    /// regrowing, depending on [`WorkerConfig::overflow`]).
    pub fn overflow(&self) -> u64 {
        self.overflow
    }

    pub fn neurons(&self) -> &FieldPool {
        &self.neurons
    }

    pub fn synapses(&self) -> &FieldPool {
        &self.synapses
    }

    /// Current step: the next call to [`WorkerState::step`] simulates it.
    pub fn now(&self) -> Step {
        self.t
    }

    /// Bytes held by adjacency, pools and per-synapse bookkeeping.
    pub fn memory_bytes(&self) -> usize {
        self.adj.bytes() + self.synapses.bytes() + self.neurons.bytes() + self.last_arrival.len() * 4
    }

    /// Global neuron `id`'s record index in the local neuron pool.
    pub fn local_index(&self, id: NeuronId) -> Option<usize> {
        (id < self.partition.neurons() && self.partition.owner(id) == self.gid)
            .then(|| self.partition.global_to_local(id) as usize)
    }

    /// Advances every owned neuron by one step. Fired IDs come out ascending,
    /// are queued for local delivery `delay` steps later and recorded in the
    /// outbox.
    pub fn update_neurons(&mut self) -> &[NeuronId] {
        let Self { model, config, partition, gid, owned, neurons, last_spike, fired, t, .. } = self;
        fired.clear();
        let mut cols = neurons.columns_mut();
        let mut shared = (NeuronId::MAX, [0u32; 4]);
        let slice = partition.slice_width();
        let (mut j, mut left) = (0, 0);
        for i in 0..*owned {
            // Same sequence as `local_to_global(gid, i)`, without a division
            // per neuron.
            if left == 0 {
                j = partition.local_to_global(*gid, i).expect("owned index in range");
                left = slice;
            } else {
                j += 1;
            }
            left -= 1;
            if j >> 2 != shared.0 {
                shared = (j >> 2, KeyedRng::neuron_step_block(config.seed, j, *t));
            }
            let rng = KeyedRng::for_neuron_step_with(config.seed, j, *t, shared.1);
            let mut ctx = UpdateCtx { step: *t, dt: config.dt, rng };
            if model.update_neuron(j, &mut RecordMut::new(&mut cols, i as usize), &mut ctx) {
                fired.push(j);
                last_spike[i as usize] = *t;
            }
        }
        self.ring.extend(self.t, &self.fired);
        if !self.fired.is_empty() {
            self.outbox.push((self.t, self.fired.clone()));
        }
        &self.fired
    }

    /// One step: neurons are advanced, then the spikes fired `delay` steps
    /// ago are delivered.
    pub fn step(&mut self) -> StepStats {
        let due = self.ring.take_due(self.t);
        let fired = self.update_neurons().len() as u32;
        let delivered = self.transmit_spikes(due.ids());
        let stats = StepStats { step: self.t, fired, delivered };
        self.t += 1;
        stats
    }

    /// Runs `steps` steps and returns every (step, neuron) firing in order.
    pub fn run(&mut self, steps: u32) -> Vec<(Step, NeuronId)> {
        let mut train = Vec::new();
        for _ in 0..steps {
            let t = self.t;
            self.step();
            train.extend(self.fired.iter().map(|&id| (t, id)));
        }
        self.outbox.clear();
        train
    }

    /// Spikes fired by other workers at step `fired_at`. IDs owned here are
    /// already queued and are skipped.
    pub fn insert_remote(&mut self, fired_at: Step, ids: &[NeuronId]) {
        for &id in ids {
            if self.partition.owner(id) != self.gid {
                self.ring.push(fired_at, id);
            }
        }
    }

    /// Local firings recorded since the last drain, by step.
    pub fn drain_outbox(&mut self) -> Vec<(Step, Vec<NeuronId>)> {
        core::mem::take(&mut self.outbox)
    }

    pub fn outbox_spike_count(&self) -> usize {
        self.outbox.iter().map(|(_, ids)| ids.len()).sum()
    }
}
