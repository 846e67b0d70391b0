use super::constants::{brunel as c, stdp as s};
use super::lif::LifParams;
use super::stdp::StdpParams;
use crate::error::CoreResult;
use crate::model::{Delivery, Edge, Model, SpikeTiming, UpdateCtx};
use crate::pool::{FieldSpec, RecordMut, RecordRef};
use crate::rng::{KeyedRng, PoissonTable};
use crate::NeuronId;

const V: usize = 0;
const INPUT: usize = 1;
const REF: usize = 2;
const W: usize = 0;

static NEURON_FIELDS: [FieldSpec; 3] =
    [FieldSpec::f32("v"), FieldSpec::f32("input"), FieldSpec::u32("refractory")];
static SYNAPSE_FIELDS: [FieldSpec; 1] = [FieldSpec::f32("w")];

/// Current-based LIF network with instantaneous (delta) synapses and an
/// independent Poisson drive per neuron.
#[derive(Debug, Clone, PartialEq)]
pub struct Brunel {
    pub lif: LifParams,
    pub n_exc: u32,
    /// Excitatory weight (V), already scaled.
    pub j_exc: f32,
    /// Inhibitory weight (V, negative), already scaled.
    pub j_inh: f32,
    /// Weight of one external input (V).
    pub j_ext: f32,
    /// Total external input rate per neuron (Hz).
    pub ext_rate: f64,
    /// External input count per step, for the step length the model was
    /// built for.
    ext: PoissonTable,
}

impl Brunel {
    pub fn new(n_exc: u32, weight_scale: f64, dt: f64) -> CoreResult<Self> {
        let lif = LifParams {
            tau_m: c::TAU_M,
            v_rest: c::V_REST,
            v_reset: c::V_RESET,
            v_thresh: c::V_THRESH,
            t_ref: c::T_REF,
        };
        lif.validate()?;
        let nu_thr = c::V_THRESH / (c::J * c::C_EXT * c::TAU_M);
        let ext_rate = c::ETA * nu_thr * c::C_EXT;
        Ok(Self {
            lif,
            n_exc,
            j_exc: (c::J * weight_scale) as f32,
            j_inh: (-c::G * c::J * weight_scale) as f32,
            j_ext: c::J as f32,
            ext_rate,
            ext: PoissonTable::new(ext_rate * dt),
        })
    }

    #[inline]
    pub fn weight(&self, src: NeuronId) -> f32 {
        if src < self.n_exc {
            self.j_exc
        } else {
            self.j_inh
        }
    }

    fn init(&self, neuron: &mut RecordMut<'_, '_>, rng: &mut KeyedRng) {
        let v = self.lif.v_rest + rng.next_f64() * (self.lif.v_thresh - self.lif.v_rest);
        neuron.set_f32(V, v as f32);
        neuron.set_f32(INPUT, 0.0);
        neuron.set_u32(REF, 0);
    }

    #[inline]
    fn update(&self, neuron: &mut RecordMut<'_, '_>, ctx: &mut UpdateCtx) -> bool {
        let input = neuron.f32(INPUT);
        neuron.set_f32(INPUT, 0.0);
        let refractory = neuron.u32(REF);
        if refractory > 0 {
            neuron.set_u32(REF, refractory - 1);
            return false;
        }
        let ext = self.ext.sample(&mut ctx.rng) as f32 * self.j_ext;
        let mut v = neuron.f32(V);
        let rest = self.lif.v_rest as f32;
        v += ctx.dt / self.lif.tau_m as f32 * (rest - v) + input + ext;
        if v >= self.lif.v_thresh as f32 {
            neuron.set_f32(V, self.lif.v_reset as f32);
            neuron.set_u32(REF, self.lif.refractory_steps(ctx.dt));
            true
        } else {
            neuron.set_f32(V, v);
            false
        }
    }
}

impl Model for Brunel {
    fn neuron_fields(&self) -> &[FieldSpec] {
        &NEURON_FIELDS
    }

    fn synapse_fields(&self) -> &[FieldSpec] {
        &[]
    }

    fn init_neuron(&self, _id: NeuronId, neuron: &mut RecordMut<'_, '_>, rng: &mut KeyedRng) {
        self.init(neuron, rng);
    }

    fn update_neuron(&self, _id: NeuronId, neuron: &mut RecordMut<'_, '_>, ctx: &mut UpdateCtx) -> bool {
        self.update(neuron, ctx)
    }

    #[inline]
    fn receive_spike(&self, edge: Edge, _: &mut RecordMut<'_, '_>, _: RecordRef<'_, '_>) -> Delivery {
        Delivery::new(INPUT, self.weight(edge.src))
    }
}

/// [`Brunel`] with a per-synapse weight and pair-based plasticity on
/// excitatory-to-excitatory synapses.
#[derive(Debug, Clone, PartialEq)]
pub struct BrunelPlus {
    pub base: Brunel,
    pub stdp: StdpParams,
}

impl BrunelPlus {
    pub fn new(n_exc: u32, weight_scale: f64, dt: f64) -> CoreResult<Self> {
        let j = c::J * weight_scale;
        let stdp = StdpParams {
            a_plus: s::A_PLUS * j,
            a_minus: s::A_MINUS * j,
            tau_plus: s::TAU_PLUS,
            tau_minus: s::TAU_MINUS,
            w_min: s::W_MIN * j,
            w_max: s::W_MAX * j,
        };
        stdp.validate()?;
        Ok(Self { base: Brunel::new(n_exc, weight_scale, dt)?, stdp })
    }

    #[inline]
    fn plastic(&self, edge: Edge) -> bool {
        edge.src < self.base.n_exc && edge.dst < self.base.n_exc
    }
}

impl Model for BrunelPlus {
    fn neuron_fields(&self) -> &[FieldSpec] {
        &NEURON_FIELDS
    }

    fn synapse_fields(&self) -> &[FieldSpec] {
        &SYNAPSE_FIELDS
    }

    fn init_neuron(&self, _id: NeuronId, neuron: &mut RecordMut<'_, '_>, rng: &mut KeyedRng) {
        self.base.init(neuron, rng);
    }

    fn init_synapse(&self, edge: Edge, synapse: &mut RecordMut<'_, '_>) {
        synapse.set_f32(W, self.base.weight(edge.src));
    }

    fn update_neuron(&self, _id: NeuronId, neuron: &mut RecordMut<'_, '_>, ctx: &mut UpdateCtx) -> bool {
        self.base.update(neuron, ctx)
    }

    #[inline]
    fn receive_spike(&self, _: Edge, synapse: &mut RecordMut<'_, '_>, _: RecordRef<'_, '_>) -> Delivery {
        Delivery::new(INPUT, synapse.f32(W))
    }

    fn is_plastic(&self) -> bool {
        true
    }

    fn on_pre_spike(&self, edge: Edge, synapse: &mut RecordMut<'_, '_>, timing: SpikeTiming) {
        if self.plastic(edge) {
            synapse.set_f32(W, self.stdp.depress(synapse.f32(W), timing.delta));
        }
    }

    fn on_post_spike(&self, edge: Edge, synapse: &mut RecordMut<'_, '_>, timing: SpikeTiming) {
        if self.plastic(edge) {
            synapse.set_f32(W, self.stdp.potentiate(synapse.f32(W), timing.delta));
        }
    }
}
