//! Experiment drivers: simulation time, setup time and multi-worker scaling,
//! each producing CSV rows.

use spikeforge_core::models::{constants, make_synth, AnyModel, ModelBundle, ModelKind, SynthParams};
use spikeforge_core::{CoreError, TopologyDescriptor};
use thiserror::Error;

use crate::alloc_counter;
use crate::cluster::{build_workers, simulate, ClusterConfig, ClusterError, SimOutput, WorkerInfo};
use crate::report::{Row, ScalingRow, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

impl BenchError {
    /// Whether the failure came from running out of memory or address space.
    pub fn is_resource(&self) -> bool {
        let core = match self {
            BenchError::Core(e) => Some(e),
            BenchError::Cluster(ClusterError::Build { source, .. }) => Some(source),
            _ => None,
        };
        matches!(core, Some(CoreError::AllocationFailed { .. } | CoreError::CapacityOverflow { .. }))
    }
}

/// What gets simulated, independent of its size.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Bio(ModelKind),
    Synth { density: f64, activity: f64, delay: u32 },
    /// A descriptor read from a file, driven by Synth neurons.
    Custom { descriptor: TopologyDescriptor, activity: f64, delay: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Size {
    Neurons(f64),
    /// Target expected synapse count.
    Synapses(f64),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Bio(k) => k.name(),
            Family::Synth { .. } => "synth",
            Family::Custom { .. } => "custom",
        }
    }

    /// Instantiates the family at `size`; `size` is ignored for custom
    /// descriptors.
    pub fn bundle(&self, size: Option<Size>, dt: f64) -> Result<ModelBundle<AnyModel>, BenchError> {
        match self {
            Family::Bio(kind) => {
                let base = kind.build(1.0, dt)?;
                let scale = match size {
                    None => 1.0,
                    Some(Size::Neurons(n)) => n / base.descriptor.neurons() as f64,
                    Some(Size::Synapses(s)) => (s / base.descriptor.expected_edges()).sqrt(),
                };
                Ok(kind.build(scale, dt)?)
            }
            Family::Synth { density, activity, delay } => {
                let n = match size {
                    Some(Size::Neurons(n)) => n,
                    Some(Size::Synapses(s)) if *density > 0.0 => (s / density).sqrt(),
                    _ => return Err(BenchError::Invalid("synth needs --neurons or --synapses".into())),
                };
                if !(1.0..=u32::MAX as f64).contains(&n.round()) {
                    return Err(BenchError::Invalid(format!("neuron count {n} out of range")));
                }
                let params = SynthParams { neurons: n.round() as u32, density: *density, activity: *activity, delay: *delay };
                let mut b = make_synth(params)?.map(AnyModel::Synth);
                b.dt = dt;
                Ok(b)
            }
            Family::Custom { descriptor, activity, delay } => {
                let params = SynthParams { neurons: descriptor.neurons(), density: 0.0, activity: *activity, delay: *delay };
                let mut b = make_synth(params)?.map(AnyModel::Synth);
                b.descriptor = descriptor.clone();
                b.dt = dt;
                Ok(b)
            }
        }
    }
}

/// Everything about a run except the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub workers: u32,
    pub slice: Option<u32>,
    pub seed: u64,
    pub seconds: f64,
    pub dt: f64,
    pub tasks: usize,
}

impl RunConfig {
    pub fn new(workers: u32, seed: u64, seconds: f64) -> Self {
        Self { workers, slice: None, seed, seconds, dt: constants::DT, tasks: 1 }
    }

    pub fn cluster(&self) -> ClusterConfig {
        let mut c = ClusterConfig::new(self.workers, self.seed);
        c.slice = self.slice;
        c.tasks = self.tasks.max(1);
        c
    }

    pub fn steps(&self) -> u32 {
        (self.seconds / self.dt).round() as u32
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemoryReport {
    pub adjacency_bytes: u64,
    pub synapse_bytes: u64,
    pub neuron_bytes: u64,
    pub padding: f64,
    /// Heap high-water mark during construction, above what was live before
    /// it. Zero unless the counting allocator is installed.
    pub peak_setup_bytes: u64,
    /// Part of the peak not retained after construction.
    pub aux_setup_bytes: u64,
}

impl MemoryReport {
    pub fn total(&self) -> u64 {
        self.adjacency_bytes + self.synapse_bytes + self.neuron_bytes
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetupReport {
    pub seconds: f64,
    pub synapses: u64,
    pub neurons: u32,
    pub slice_width: u32,
    pub memory: MemoryReport,
    pub workers: Vec<WorkerInfo>,
}

impl SetupReport {
    pub fn throughput(&self) -> f64 {
        if self.seconds == 0.0 {
            return 0.0;
        }
        self.synapses as f64 / self.seconds
    }
}

fn padding(infos: &[WorkerInfo]) -> f64 {
    let slots: u64 = infos.iter().map(|i| i.adjacency_bytes as u64 / 4).sum();
    let edges: u64 = infos.iter().map(|i| i.edges).sum();
    if slots == 0 {
        0.0
    } else {
        1.0 - edges as f64 / slots as f64
    }
}

/// Times construction alone: descriptor to populated adjacency and pools.
pub fn measure_setup(bundle: &ModelBundle<AnyModel>, run: &RunConfig) -> Result<SetupReport, BenchError> {
    let cluster = run.cluster();
    let slice_width = cluster.partition(bundle.descriptor.neurons())?.slice_width();
    let before = alloc_counter::current();
    alloc_counter::reset_peak();
    let (workers, infos, seconds) = build_workers(bundle, &cluster)?;
    let peak = alloc_counter::peak().saturating_sub(before);
    let retained = alloc_counter::current().saturating_sub(before);
    let memory = MemoryReport {
        adjacency_bytes: infos.iter().map(|i| i.adjacency_bytes as u64).sum(),
        synapse_bytes: workers.iter().map(|w| w.synapses().bytes() as u64).sum(),
        neuron_bytes: workers.iter().map(|w| w.neurons().bytes() as u64).sum(),
        padding: padding(&infos),
        peak_setup_bytes: peak as u64,
        aux_setup_bytes: peak.saturating_sub(retained) as u64,
    };
    drop(workers);
    Ok(SetupReport {
        seconds,
        synapses: infos.iter().map(|i| i.edges).sum(),
        neurons: bundle.descriptor.neurons(),
        slice_width,
        memory,
        workers: infos,
    })
}

pub fn setup_row(family: &Family, run: &RunConfig, r: &SetupReport) -> Row {
    Row {
        schema_version: SCHEMA_VERSION,
        experiment: "setup".into(),
        model: family.name().into(),
        neurons: r.neurons,
        synapses: r.synapses,
        workers: run.workers,
        slice_width: r.slice_width,
        seed: run.seed,
        bio_seconds: 0.0,
        wall_seconds: r.seconds,
        ratio: 0.0,
        setup_seconds: r.seconds,
        sync_seconds: 0.0,
        mem_bytes: r.memory.total(),
    }
}

/// Builds and simulates; returns the CSV row and the full output.
pub fn measure_sim(
    family: &Family,
    bundle: &ModelBundle<AnyModel>,
    run: &RunConfig,
) -> Result<(Row, SimOutput), BenchError> {
    let cluster = run.cluster();
    let slice_width = cluster.partition(bundle.descriptor.neurons())?.slice_width();
    let out = simulate(bundle, &cluster, run.steps())?;
    let t = &out.timing;
    let row = Row {
        schema_version: SCHEMA_VERSION,
        experiment: "sim".into(),
        model: family.name().into(),
        neurons: bundle.descriptor.neurons(),
        synapses: out.workers.iter().map(|i| i.edges).sum(),
        workers: run.workers,
        slice_width,
        seed: run.seed,
        bio_seconds: out.steps as f64 * bundle.dt,
        wall_seconds: t.wall_seconds(),
        ratio: t.ratio(bundle.dt),
        setup_seconds: out.setup_seconds,
        sync_seconds: t.sync_seconds(),
        mem_bytes: out.workers.iter().map(|i| i.memory_bytes as u64).sum(),
    };
    Ok((row, out))
}

/// Wall/bio ratio of `family` at `synapses` on `run.workers` workers.
fn ratio_at(family: &Family, synapses: f64, run: &RunConfig) -> Result<(f64, u64), BenchError> {
    let bundle = family.bundle(Some(Size::Synapses(synapses)), run.dt)?;
    let (row, _) = measure_sim(family, &bundle, run)?;
    Ok((row.ratio, row.synapses))
}

/// Largest size (as a multiple of `base_synapses`) at which `run` matches
/// `target` within `tol`, by bracketing and log-scale bisection.
fn scaleup(family: &Family, base_synapses: f64, target: f64, run: &RunConfig, tol: f64) -> Result<(f64, f64, u64), BenchError> {
    let close = |r: f64| ((r - target) / target).abs() <= tol;
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    let (r, syn) = ratio_at(family, base_synapses, run)?;
    let mut best = (1.0, r, syn);
    if close(r) {
        return Ok(best);
    }
    let grow = r < target;
    for _ in 0..6 {
        let f = if grow { hi * 2.0 } else { lo / 2.0 };
        let (r, syn) = ratio_at(family, base_synapses * f, run)?;
        best = (f, r, syn);
        if close(r) {
            return Ok(best);
        }
        if grow {
            (lo, hi) = (hi, f);
            if r > target {
                break;
            }
        } else {
            (lo, hi) = (f, lo);
            if r < target {
                break;
            }
        }
    }
    for _ in 0..8 {
        let f = (lo * hi).sqrt();
        let (r, syn) = ratio_at(family, base_synapses * f, run)?;
        best = (f, r, syn);
        if close(r) {
            break;
        }
        if r < target {
            lo = f;
        } else {
            hi = f;
        }
    }
    Ok(best)
}

/// Speedup `T(1)/T(G)` at the base size and scaleup (size at which `G`
/// workers match the single-worker time within 5%) for every `G`.
pub fn measure_scaling(
    family: &Family,
    base_synapses: f64,
    workers: &[u32],
    run: &RunConfig,
) -> Result<Vec<ScalingRow>, BenchError> {
    let single = RunConfig { workers: 1, ..*run };
    let (t1, syn1) = ratio_at(family, base_synapses, &single)?;
    let mut rows = Vec::new();
    for &g in workers {
        let rg = RunConfig { workers: g, ..*run };
        let row = |experiment: &str, value: f64, synapses: u64, ratio: f64| ScalingRow {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.into(),
            model: family.name().into(),
            workers: g,
            seed: run.seed,
            base_synapses: syn1,
            synapses,
            value,
            base_ratio: t1,
            ratio,
        };
        if g == 1 {
            rows.push(row("speedup", 1.0, syn1, t1));
            rows.push(row("scaleup", 1.0, syn1, t1));
            continue;
        }
        let (tg, syn) = ratio_at(family, base_synapses, &rg)?;
        rows.push(row("speedup", t1 / tg, syn, tg));
        let (f, r, syn) = scaleup(family, base_synapses, t1, &rg, 0.05)?;
        rows.push(row("scaleup", f, syn, r));
    }
    Ok(rows)
}

/// Which measurement a preset runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sim,
    Setup,
    Scale,
}

/// A named experiment reproducing one evaluation axis at desk scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub mode: Mode,
    pub families: Vec<Family>,
    pub synapses: Vec<f64>,
    pub workers: Vec<u32>,
    pub seconds: f64,
}

pub fn presets() -> Vec<Preset> {
    let bio = vec![Family::Bio(ModelKind::Vogels), Family::Bio(ModelKind::Brunel), Family::Bio(ModelKind::BrunelPlus)];
    let synth = Family::Synth { density: 0.00156, activity: 0.005, delay: 1 };
    vec![
        Preset {
            name: "sim-size",
            mode: Mode::Sim,
            families: bio.clone(),
            synapses: vec![1e5, 1e6, 1e7],
            workers: vec![1],
            seconds: 1.0,
        },
        Preset {
            name: "synth-size",
            mode: Mode::Sim,
            families: vec![synth.clone()],
            synapses: vec![1e6, 3e6, 1e7, 3e7],
            workers: vec![1],
            seconds: 0.1,
        },
        Preset {
            name: "setup-size",
            mode: Mode::Setup,
            families: vec![Family::Synth { density: 0.05, activity: 0.005, delay: 1 }],
            synapses: vec![1e6, 3e6, 1e7, 3e7, 1e8],
            workers: vec![1],
            seconds: 0.0,
        },
        Preset {
            name: "scaling",
            mode: Mode::Scale,
            families: vec![Family::Bio(ModelKind::Brunel), synth],
            synapses: vec![1e6],
            workers: vec![1, 2, 4, 8],
            seconds: 0.2,
        },
    ]
}

pub fn preset(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name == name)
}
