//! Brute-force reference simulator shared by the integration tests.
//!
//! It keeps the whole network in one place, updates every neuron with its own
//! freshly keyed stream, and delivers spikes row by row after gathering every
//! contribution to a target and sorting them by source.

#![allow(dead_code)]

use std::collections::VecDeque;

use spikeforge_core::rng::KeyedRng;
use spikeforge_core::{
    make_pools, AdjacencyList, Delivery, Edge, FieldPool, FieldSpec, Model, NeuronId, RecordMut,
    RecordRef, Step, UpdateCtx,
};

pub struct Reference<M: Model> {
    pub model: M,
    pub rows: Vec<Vec<NeuronId>>,
    pub neurons: FieldPool,
    seed: u64,
    dt: f32,
    pending: VecDeque<Vec<NeuronId>>,
    t: Step,
}

impl<M: Model> Reference<M> {
    /// `rows[i]` lists the targets of neuron `i`. Non-plastic models only.
    pub fn new(model: M, rows: Vec<Vec<NeuronId>>, seed: u64, dt: f32, delay: u32) -> Self {
        assert!(!model.is_plastic());
        let empty = AdjacencyList::new(rows.len(), 0).unwrap();
        let (neurons, _) = make_pools(&model, rows.len(), &empty, seed).unwrap();
        let pending = (0..delay).map(|_| Vec::new()).collect();
        Self { model, rows, neurons, seed, dt, pending, t: 0 }
    }

    pub fn from_adjacency(model: M, adj: &AdjacencyList, seed: u64, dt: f32, delay: u32) -> Self {
        let rows = (0..adj.rows()).map(|i| adj.valid_row(i).to_vec()).collect();
        Self::new(model, rows, seed, dt, delay)
    }

    /// One step; returns the neurons that fired.
    pub fn step(&mut self) -> Vec<NeuronId> {
        let mut due = self.pending.pop_front().unwrap();
        due.sort_unstable();
        due.dedup();

        let mut fired = Vec::new();
        {
            let mut cols = self.neurons.columns_mut();
            for j in 0..self.rows.len() as u32 {
                let rng = KeyedRng::for_neuron_step(self.seed, j, self.t);
                let mut ctx = UpdateCtx { step: self.t, dt: self.dt, rng };
                if self.model.update_neuron(j, &mut RecordMut::new(&mut cols, j as usize), &mut ctx) {
                    fired.push(j);
                }
            }
        }

        let mut contributions: Vec<(NeuronId, NeuronId, Delivery)> = Vec::new();
        {
            let post = self.neurons.columns();
            let mut none: Vec<&mut [u32]> = Vec::new();
            for &src in &due {
                for &dst in &self.rows[src as usize] {
                    let edge = Edge { src, dst };
                    let d = self.model.receive_spike(
                        edge,
                        &mut RecordMut::new(&mut none, 0),
                        RecordRef::new(&post, dst as usize),
                    );
                    contributions.push((dst, src, d));
                }
            }
        }
        contributions.sort_by_key(|&(dst, src, _)| (dst, src));
        for (dst, _, d) in contributions {
            let f = d.field as usize;
            let v = self.neurons.get_f32(f, dst as usize) + d.amount;
            self.neurons.set_f32(f, dst as usize, v);
        }

        self.pending.push_back(fired.clone());
        self.t += 1;
        fired
    }

    pub fn run(&mut self, steps: u32) -> Vec<(Step, NeuronId)> {
        let mut train = Vec::new();
        for _ in 0..steps {
            let t = self.t;
            train.extend(self.step().into_iter().map(|id| (t, id)));
        }
        train
    }
}

static HASHED_FIELDS: [FieldSpec; 2] = [FieldSpec::f32("v"), FieldSpec::f32("input")];

/// Leaky unit whose synaptic weights are distinct per edge, so any change in
/// summation order shows up in the low bits of the state.
#[derive(Debug, Clone, Copy)]
pub struct Hashed {
    pub drive: f64,
}

pub fn edge_weight(edge: Edge) -> f32 {
    let h = edge.src.wrapping_mul(0x9E37_79B9) ^ edge.dst.wrapping_mul(0x85EB_CA6B);
    let h = h ^ (h >> 15);
    (h % 10_007) as f32 / 10_007.0 * 0.35 - 0.1
}

impl Model for Hashed {
    fn neuron_fields(&self) -> &[FieldSpec] {
        &HASHED_FIELDS
    }

    fn synapse_fields(&self) -> &[FieldSpec] {
        &[]
    }

    fn init_neuron(&self, _: NeuronId, neuron: &mut RecordMut<'_, '_>, rng: &mut KeyedRng) {
        neuron.set_f32(0, rng.next_f64() as f32);
        neuron.set_f32(1, 0.0);
    }

    fn update_neuron(&self, _: NeuronId, neuron: &mut RecordMut<'_, '_>, ctx: &mut UpdateCtx) -> bool {
        let kick = if ctx.rng.bernoulli(self.drive) { 0.5 } else { 0.0 };
        let v = neuron.f32(0) * 0.9 + neuron.f32(1) + kick;
        neuron.set_f32(1, 0.0);
        if v >= 1.0 {
            neuron.set_f32(0, 0.0);
            true
        } else {
            neuron.set_f32(0, v);
            false
        }
    }

    fn receive_spike(&self, edge: Edge, _: &mut RecordMut<'_, '_>, _: RecordRef<'_, '_>) -> Delivery {
        Delivery::new(1, edge_weight(edge))
    }
}
