use super::constants::vogels as c;
use super::lif::LifParams;
use crate::error::CoreResult;
use crate::model::{Delivery, Edge, Model, UpdateCtx};
use crate::pool::{FieldSpec, RecordMut, RecordRef};
use crate::rng::{KeyedRng, PoissonTable};
use crate::NeuronId;

const V: usize = 0;
const G_EXC: usize = 1;
const G_INH: usize = 2;
const REF: usize = 3;

static NEURON_FIELDS: [FieldSpec; 4] = [
    FieldSpec::f32("v"),
    FieldSpec::f32("g_exc"),
    FieldSpec::f32("g_inh"),
    FieldSpec::u32("refractory"),
];

/// Conductance-based LIF network with exponentially decaying excitatory and
/// inhibitory conductances (in units of the leak conductance).
#[derive(Debug, Clone, PartialEq)]
pub struct Vogels {
    pub lif: LifParams,
    pub n_exc: u32,
    pub e_exc: f32,
    pub e_inh: f32,
    pub tau_exc: f32,
    pub tau_inh: f32,
    pub w_exc: f32,
    pub w_inh: f32,
    /// Background input count per step.
    pub ext: PoissonTable,
    pub w_ext: f32,
}

impl Vogels {
    pub fn new(n_exc: u32, weight_scale: f64, dt: f64) -> CoreResult<Self> {
        let lif = LifParams {
            tau_m: c::TAU_M,
            v_rest: c::E_LEAK,
            v_reset: c::V_RESET,
            v_thresh: c::V_THRESH,
            t_ref: c::T_REF,
        };
        lif.validate()?;
        Ok(Self {
            lif,
            n_exc,
            e_exc: c::E_EXC as f32,
            e_inh: c::E_INH as f32,
            tau_exc: c::TAU_EXC as f32,
            tau_inh: c::TAU_INH as f32,
            w_exc: (c::W_EXC * weight_scale) as f32,
            w_inh: (c::W_INH * weight_scale) as f32,
            ext: PoissonTable::new(c::EXT_RATE * dt),
            w_ext: c::W_EXT as f32,
        })
    }
}

/// Decayed conductances are cut to zero before they turn subnormal.
#[inline]
fn flush(g: f32) -> f32 {
    if g < 1e-30 {
        0.0
    } else {
        g
    }
}

impl Model for Vogels {
    fn neuron_fields(&self) -> &[FieldSpec] {
        &NEURON_FIELDS
    }

    fn synapse_fields(&self) -> &[FieldSpec] {
        &[]
    }

    fn init_neuron(&self, _id: NeuronId, neuron: &mut RecordMut<'_, '_>, rng: &mut KeyedRng) {
        let v = self.lif.v_reset + rng.next_f64() * (self.lif.v_thresh - self.lif.v_reset);
        let ge = c::G_EXC_INIT.0 + c::G_EXC_INIT.1 * rng.next_normal();
        let gi = c::G_INH_INIT.0 + c::G_INH_INIT.1 * rng.next_normal();
        neuron.set_f32(V, v as f32);
        neuron.set_f32(G_EXC, ge.max(0.0) as f32);
        neuron.set_f32(G_INH, gi.max(0.0) as f32);
        neuron.set_u32(REF, 0);
    }

    fn update_neuron(&self, _id: NeuronId, neuron: &mut RecordMut<'_, '_>, ctx: &mut UpdateCtx) -> bool {
        let dt = ctx.dt;
        let mut ge = neuron.f32(G_EXC);
        let gi = neuron.f32(G_INH);
        let v = neuron.f32(V);
        let refractory = neuron.u32(REF);
        let mut fired = false;
        if refractory > 0 {
            neuron.set_u32(REF, refractory - 1);
        } else {
            let leak = self.lif.v_rest as f32 - v;
            let dv = leak + ge * (self.e_exc - v) + gi * (self.e_inh - v);
            let v = v + dt / self.lif.tau_m as f32 * dv;
            if v >= self.lif.v_thresh as f32 {
                neuron.set_f32(V, self.lif.v_reset as f32);
                neuron.set_u32(REF, self.lif.refractory_steps(dt));
                fired = true;
            } else {
                neuron.set_f32(V, v);
            }
        }
        ge += self.ext.sample(&mut ctx.rng) as f32 * self.w_ext;
        neuron.set_f32(G_EXC, flush(ge - dt / self.tau_exc * ge));
        neuron.set_f32(G_INH, flush(gi - dt / self.tau_inh * gi));
        fired
    }

    #[inline]
    fn receive_spike(&self, edge: Edge, _: &mut RecordMut<'_, '_>, _: RecordRef<'_, '_>) -> Delivery {
        if edge.src < self.n_exc {
            Delivery::new(G_EXC, self.w_exc)
        } else {
            Delivery::new(G_INH, self.w_inh)
        }
    }
}
