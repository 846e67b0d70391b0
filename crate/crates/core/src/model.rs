//! The callback interface a neuron/synapse model implements.

use crate::pool::{FieldSpec, RecordMut, RecordRef};
use crate::rng::KeyedRng;
use crate::{NeuronId, Step};

/// One synapse, named by its endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub src: NeuronId,
    pub dst: NeuronId,
}

/// Input produced by one spike arriving over one synapse: `amount` is added
/// to neuron field `field` of the target.
///
/// Keeping the post-synaptic effect additive lets the engine apply all
/// contributions to a target in ascending source order no matter how the
/// synapses were traversed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delivery {
    pub field: u16,
    pub amount: f32,
}

impl Delivery {
    pub const fn new(field: usize, amount: f32) -> Self {
        Self { field: field as u16, amount }
    }
}

/// Context handed to [`Model::update_neuron`].
pub struct UpdateCtx {
    pub step: Step,
    pub dt: f32,
    /// Stream keyed by (seed, neuron, step).
    pub rng: KeyedRng,
}

/// Timing information for plasticity hooks. `delta` is the pre/post interval
/// in seconds (always non-negative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikeTiming {
    pub now: Step,
    pub delta: f32,
}

/// A neuron and synapse model. Callbacks may only touch the views and rng
/// they are given.
pub trait Model: Sync + Send {
    fn neuron_fields(&self) -> &[FieldSpec];

    fn synapse_fields(&self) -> &[FieldSpec];

    fn init_neuron(&self, id: NeuronId, neuron: &mut RecordMut<'_, '_>, rng: &mut KeyedRng);

    fn init_synapse(&self, _edge: Edge, _synapse: &mut RecordMut<'_, '_>) {}

    /// Advances one neuron by one step; returns whether it fired.
    fn update_neuron(&self, id: NeuronId, neuron: &mut RecordMut<'_, '_>, ctx: &mut UpdateCtx) -> bool;

    /// Called once per spike per valid synapse of the spiking neuron.
    fn receive_spike(
        &self,
        edge: Edge,
        synapse: &mut RecordMut<'_, '_>,
        post: RecordRef<'_, '_>,
    ) -> Delivery;

    /// Whether the engine should track arrival times and invoke the
    /// plasticity hooks below.
    fn is_plastic(&self) -> bool {
        false
    }

    /// A spike arrives at a synapse whose target last fired `timing.delta`
    /// seconds earlier.
    fn on_pre_spike(&self, _edge: Edge, _synapse: &mut RecordMut<'_, '_>, _timing: SpikeTiming) {}

    /// The target fired `timing.delta` seconds after the previous arrival at
    /// this synapse. Applied lazily, right before the next arrival.
    fn on_post_spike(&self, _edge: Edge, _synapse: &mut RecordMut<'_, '_>, _timing: SpikeTiming) {}
}
