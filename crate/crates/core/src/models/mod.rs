//! The benchmark models and their network descriptors.

pub mod constants;
mod brunel;
mod lif;
mod stdp;
mod synth;
mod vogels;

use core::fmt;
use core::str::FromStr;

pub use brunel::{Brunel, BrunelPlus};
pub use lif::LifParams;
pub use stdp::StdpParams;
pub use synth::{Synth, SynthParams};
pub use vogels::Vogels;

use crate::error::{CoreError, CoreResult};
use crate::model::{Delivery, Edge, Model, SpikeTiming, UpdateCtx};
use crate::pool::{FieldSpec, RecordMut, RecordRef};
use crate::rng::KeyedRng;
use crate::topology::{ConnectRule, IdRange, TopologyDescriptor};
use crate::NeuronId;

/// A ready-to-simulate model: its network, callbacks, delay (steps) and step
/// length (s).
#[derive(Debug, Clone)]
pub struct ModelBundle<M> {
    pub descriptor: TopologyDescriptor,
    pub model: M,
    pub delay: u32,
    pub dt: f64,
}

impl<M> ModelBundle<M> {
    pub fn map<N>(self, f: impl FnOnce(M) -> N) -> ModelBundle<N> {
        ModelBundle { descriptor: self.descriptor, model: f(self.model), delay: self.delay, dt: self.dt }
    }
}

/// Scaled excitatory and inhibitory population sizes plus the weight factor
/// that keeps the summed input per neuron constant.
fn scaled_populations(n_exc: u32, n_inh: u32, scale: f64) -> CoreResult<(u32, u32, f64)> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(CoreError::InvalidParams("scale must be positive"));
    }
    let e = libm::round(n_exc as f64 * scale);
    let i = libm::round(n_inh as f64 * scale);
    if e < 1.0 || i < 1.0 {
        return Err(CoreError::InvalidParams("scale leaves a population empty"));
    }
    if e + i > u32::MAX as f64 {
        return Err(CoreError::CapacityOverflow { what: "neuron count", elements: (e + i) as u128 });
    }
    // Under a fixed connection probability the in-degree is proportional to N.
    let factor = (n_exc + n_inh) as f64 / (e + i);
    Ok((e as u32, i as u32, factor))
}

fn two_population_descriptor(e: u32, i: u32, p: f64) -> CoreResult<TopologyDescriptor> {
    let all = IdRange::new(0, e + i);
    TopologyDescriptor::new(
        e + i,
        [ConnectRule::new(IdRange::new(0, e), all, p), ConnectRule::new(IdRange::new(e, e + i), all, p)],
    )
}

fn delay_steps(delay: f64, dt: f64) -> CoreResult<u32> {
    if !(dt > 0.0) {
        return Err(CoreError::InvalidParams("dt must be positive"));
    }
    Ok((libm::round(delay / dt) as u32).max(1))
}

pub fn make_brunel_dt(scale: f64, dt: f64) -> CoreResult<ModelBundle<Brunel>> {
    use constants::brunel as c;
    let (e, i, factor) = scaled_populations(c::N_EXC, c::N_INH, scale)?;
    Ok(ModelBundle {
        descriptor: two_population_descriptor(e, i, c::P)?,
        model: Brunel::new(e, factor, dt)?,
        delay: delay_steps(c::DELAY, dt)?,
        dt,
    })
}

pub fn make_brunel(scale: f64) -> CoreResult<ModelBundle<Brunel>> {
    make_brunel_dt(scale, constants::DT)
}

pub fn make_brunel_plus_dt(scale: f64, dt: f64) -> CoreResult<ModelBundle<BrunelPlus>> {
    use constants::brunel as c;
    let (e, i, factor) = scaled_populations(c::N_EXC, c::N_INH, scale)?;
    Ok(ModelBundle {
        descriptor: two_population_descriptor(e, i, c::P)?,
        model: BrunelPlus::new(e, factor, dt)?,
        delay: delay_steps(c::DELAY, dt)?,
        dt,
    })
}

pub fn make_brunel_plus(scale: f64) -> CoreResult<ModelBundle<BrunelPlus>> {
    make_brunel_plus_dt(scale, constants::DT)
}

pub fn make_vogels_dt(scale: f64, dt: f64) -> CoreResult<ModelBundle<Vogels>> {
    use constants::vogels as c;
    let (e, i, factor) = scaled_populations(c::N_EXC, c::N_INH, scale)?;
    Ok(ModelBundle {
        descriptor: two_population_descriptor(e, i, c::P)?,
        model: Vogels::new(e, factor, dt)?,
        delay: delay_steps(c::DELAY, dt)?,
        dt,
    })
}

pub fn make_vogels(scale: f64) -> CoreResult<ModelBundle<Vogels>> {
    make_vogels_dt(scale, constants::DT)
}

pub fn make_synth(params: SynthParams) -> CoreResult<ModelBundle<Synth>> {
    params.validate()?;
    let all = IdRange::new(0, params.neurons);
    Ok(ModelBundle {
        descriptor: TopologyDescriptor::new(params.neurons, [ConnectRule::new(all, all, params.density)])?,
        model: Synth::new(params.activity),
        delay: params.delay,
        dt: constants::DT,
    })
}

/// Model names accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Vogels,
    Brunel,
    BrunelPlus,
    Synth,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Vogels, ModelKind::Brunel, ModelKind::BrunelPlus, ModelKind::Synth];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Vogels => "vogels",
            ModelKind::Brunel => "brunel",
            ModelKind::BrunelPlus => "brunel+",
            ModelKind::Synth => "synth",
        }
    }

    /// Base-scale neuron count of the biological models.
    pub fn base_neurons(self) -> Option<u32> {
        use constants::{brunel, vogels};
        match self {
            ModelKind::Vogels => Some(vogels::N_EXC + vogels::N_INH),
            ModelKind::Brunel | ModelKind::BrunelPlus => Some(brunel::N_EXC + brunel::N_INH),
            ModelKind::Synth => None,
        }
    }

    /// Builds a biological model at `scale`. Synth needs [`make_synth`].
    pub fn build(self, scale: f64, dt: f64) -> CoreResult<ModelBundle<AnyModel>> {
        match self {
            ModelKind::Vogels => Ok(make_vogels_dt(scale, dt)?.map(AnyModel::Vogels)),
            ModelKind::Brunel => Ok(make_brunel_dt(scale, dt)?.map(AnyModel::Brunel)),
            ModelKind::BrunelPlus => Ok(make_brunel_plus_dt(scale, dt)?.map(AnyModel::BrunelPlus)),
            ModelKind::Synth => Err(CoreError::InvalidParams("synth is built from SynthParams")),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or(CoreError::InvalidParams("unknown model name"))
    }
}

/// Any of the benchmark models behind one type.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel {
    Vogels(Vogels),
    Brunel(Brunel),
    BrunelPlus(BrunelPlus),
    Synth(Synth),
}

macro_rules! dispatch {
    ($self:ident, $m:ident => $e:expr) => {
        match $self {
            AnyModel::Vogels($m) => $e,
            AnyModel::Brunel($m) => $e,
            AnyModel::BrunelPlus($m) => $e,
            AnyModel::Synth($m) => $e,
        }
    };
}

impl Model for AnyModel {
    fn neuron_fields(&self) -> &[FieldSpec] {
        dispatch!(self, m => m.neuron_fields())
    }

    fn synapse_fields(&self) -> &[FieldSpec] {
        dispatch!(self, m => m.synapse_fields())
    }

    fn init_neuron(&self, id: NeuronId, neuron: &mut RecordMut<'_, '_>, rng: &mut KeyedRng) {
        dispatch!(self, m => m.init_neuron(id, neuron, rng))
    }

    fn init_synapse(&self, edge: Edge, synapse: &mut RecordMut<'_, '_>) {
        dispatch!(self, m => m.init_synapse(edge, synapse))
    }

    #[inline]
    fn update_neuron(&self, id: NeuronId, neuron: &mut RecordMut<'_, '_>, ctx: &mut UpdateCtx) -> bool {
        dispatch!(self, m => m.update_neuron(id, neuron, ctx))
    }

    #[inline]
    fn receive_spike(&self, edge: Edge, synapse: &mut RecordMut<'_, '_>, post: RecordRef<'_, '_>) -> Delivery {
        dispatch!(self, m => m.receive_spike(edge, synapse, post))
    }

    fn is_plastic(&self) -> bool {
        dispatch!(self, m => m.is_plastic())
    }

    fn on_pre_spike(&self, edge: Edge, synapse: &mut RecordMut<'_, '_>, timing: SpikeTiming) {
        dispatch!(self, m => m.on_pre_spike(edge, synapse, timing))
    }

    fn on_post_spike(&self, edge: Edge, synapse: &mut RecordMut<'_, '_>, timing: SpikeTiming) {
        dispatch!(self, m => m.on_post_spike(edge, synapse, timing))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_sizes() {
        let b = make_brunel(1.0).unwrap();
        assert_eq!(b.descriptor.neurons(), 12_500);
        assert_eq!(b.delay, 15);
        assert!((b.descriptor.expected_edges() - 15.625e6).abs() < 1.0);
        let v = make_vogels(1.0).unwrap();
        assert_eq!(v.descriptor.neurons(), 4_000);
        assert_eq!(v.model.n_exc, 3_200);
    }

    #[test]
    fn doubling_halves_weights() {
        let a = make_brunel(1.0).unwrap().model;
        let b = make_brunel(2.0).unwrap().model;
        assert_eq!(b.n_exc, 20_000);
        assert!((b.j_exc * 2.0 - a.j_exc).abs() < 1e-12);
        assert!((b.j_inh * 2.0 - a.j_inh).abs() < 1e-12);
    }

    #[test]
    fn empty_population_is_an_error() {
        assert!(make_vogels(1e-5).is_err());
        assert!(make_brunel(0.0).is_err());
        assert!(make_brunel(-1.0).is_err());
    }

    #[test]
    fn names_round_trip() {
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
        assert!("hodgkin".parse::<ModelKind>().is_err());
    }

    #[test]
    fn synth_descriptor() {
        let s = make_synth(SynthParams { neurons: 1000, density: 0.01, activity: 0.005, delay: 1 }).unwrap();
        assert_eq!(s.descriptor.rules().len(), 1);
        assert!((s.descriptor.expected_edges() - 1e4).abs() < 1e-6);
    }
}
