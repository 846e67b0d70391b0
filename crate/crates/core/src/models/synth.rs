use crate::error::{CoreError, CoreResult};
use crate::model::{Delivery, Edge, Model, UpdateCtx};
use crate::pool::{FieldSpec, RecordMut, RecordRef};
use crate::rng::{u32_threshold, KeyedRng};
use crate::NeuronId;

const ACC: usize = 0;

static NEURON_FIELDS: [FieldSpec; 1] = [FieldSpec::f32("acc")];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub neurons: u32,
    pub density: f64,
    pub activity: f64,
    pub delay: u32,
}

impl SynthParams {
    pub fn validate(&self) -> CoreResult<()> {
        if self.neurons == 0 {
            return Err(CoreError::EmptyNetwork);
        }
        if !(0.0..=1.0).contains(&self.density) || !(0.0..=1.0).contains(&self.activity) {
            return Err(CoreError::InvalidParams("density and activity must lie in [0, 1]"));
        }
        if self.delay == 0 {
            return Err(CoreError::InvalidParams("delay must be at least one step"));
        }
        Ok(())
    }
}

/// Memory-traffic workload: each neuron fires independently with
/// probability `activity` per step, and every arriving spike adds one to the
/// target's accumulator. Input never influences firing.
#[derive(Debug, Clone, PartialEq)]
pub struct Synth {
    threshold: u64,
}

impl Synth {
    pub fn new(activity: f64) -> Self {
        Self { threshold: u32_threshold(activity) }
    }
}

impl Model for Synth {
    fn neuron_fields(&self) -> &[FieldSpec] {
        &NEURON_FIELDS
    }

    fn synapse_fields(&self) -> &[FieldSpec] {
        &[]
    }

    fn init_neuron(&self, _id: NeuronId, neuron: &mut RecordMut<'_, '_>, _rng: &mut KeyedRng) {
        neuron.set_f32(ACC, 0.0);
    }

    #[inline]
    fn update_neuron(&self, _id: NeuronId, _: &mut RecordMut<'_, '_>, ctx: &mut UpdateCtx) -> bool {
        (ctx.rng.next_u32() as u64) < self.threshold
    }

    #[inline]
    fn receive_spike(&self, _: Edge, _: &mut RecordMut<'_, '_>, _: RecordRef<'_, '_>) -> Delivery {
        Delivery::new(ACC, 1.0)
    }
}
