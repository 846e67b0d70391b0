//! Command-line interface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use spikeforge_core::models::{constants, ModelKind};

use crate::bench::{self, BenchError, Family, Mode, RunConfig, Size};
use crate::descriptor;
use crate::report;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCES: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "spikeforge", version, about = "Multi-worker time-driven spiking network simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate and report wall-clock time per biological second.
    Sim(Opts),
    /// Time network construction only.
    Setup(Opts),
    /// Measure speedup and scaleup over the worker counts given by --gpus.
    Scale(Opts),
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// vogels | brunel | brunel+ | synth
    #[arg(long, default_value = "brunel")]
    pub model: ModelKind,
    /// Network size in neurons.
    #[arg(long, conflicts_with = "synapses")]
    pub neurons: Option<f64>,
    /// Network size as expected synapse count.
    #[arg(long)]
    pub synapses: Option<f64>,
    /// Synth connection probability.
    #[arg(long, default_value_t = constants::synth::DENSITY)]
    pub density: f64,
    /// Synth firing probability per neuron and step.
    #[arg(long, default_value_t = constants::synth::ACTIVITY)]
    pub activity: f64,
    /// Synth delay in steps.
    #[arg(long, default_value_t = constants::synth::DELAY_STEPS)]
    pub delay: u32,
    /// Worker counts (comma separated). Workers are CPU threads.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub gpus: Vec<u32>,
    #[arg(long)]
    pub slice_width: Option<u32>,
    /// Biological seconds to simulate.
    #[arg(long, default_value_t = 1.0)]
    pub seconds: f64,
    /// Step length in seconds.
    #[arg(long, default_value_t = constants::DT)]
    pub dt: f64,
    /// Seeds (comma separated); each is a separate run.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub seed: Vec<u64>,
    /// Append results to this CSV file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Custom topology file, simulated with synth neurons.
    #[arg(long)]
    pub topology: Option<PathBuf>,
    /// Run a named preset (sim-size, synth-size, setup-size, scaling);
    /// overrides model and size flags.
    #[arg(long)]
    pub preset: Option<String>,
}

/// Failure of a CLI run, with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        let code = if e.is_resource() {
            EXIT_RESOURCES
        } else if matches!(e, BenchError::Invalid(_) | BenchError::Core(_)) {
            EXIT_USAGE
        } else {
            1
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self { code: 1, message: e.to_string() }
    }
}

/// Per-worker accumulation tasks from `SPIKEFORGE_THREADS`.
pub fn thread_cap() -> Result<Option<usize>, Failure> {
    match std::env::var("SPIKEFORGE_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Failure::usage(format!("SPIKEFORGE_THREADS must be a positive integer, got `{v}`"))),
        },
    }
}

struct Plan {
    mode: Mode,
    families: Vec<Family>,
    sizes: Vec<Option<Size>>,
    workers: Vec<u32>,
    seconds: f64,
}

fn plan(mode: Mode, o: &Opts) -> Result<Plan, Failure> {
    if let Some(name) = &o.preset {
        let p = bench::preset(name).ok_or_else(|| Failure::usage(format!("unknown preset `{name}`")))?;
        return Ok(Plan {
            mode: p.mode,
            families: p.families,
            sizes: p.synapses.into_iter().map(|s| Some(Size::Synapses(s))).collect(),
            workers: p.workers,
            seconds: p.seconds,
        });
    }
    let family = match &o.topology {
        Some(path) => Family::Custom {
            descriptor: descriptor::read(path).map_err(|e| Failure::usage(e.to_string()))?,
            activity: o.activity,
            delay: o.delay,
        },
        None if o.model == ModelKind::Synth => {
            Family::Synth { density: o.density, activity: o.activity, delay: o.delay }
        }
        None => Family::Bio(o.model),
    };
    let size = match (o.neurons, o.synapses) {
        (Some(n), _) => Some(Size::Neurons(n)),
        (None, Some(s)) => Some(Size::Synapses(s)),
        (None, None) => None,
    };
    Ok(Plan { mode, families: vec![family], sizes: vec![size], workers: o.gpus.clone(), seconds: o.seconds })
}

fn validate(o: &Opts, p: &Plan) -> Result<(), Failure> {
    if p.workers.is_empty() || p.workers.contains(&0) {
        return Err(Failure::usage("--gpus must be at least 1"));
    }
    if o.slice_width == Some(0) {
        return Err(Failure::usage("--slice-width must be at least 1"));
    }
    if !(o.dt > 0.0) || !(p.seconds >= 0.0) {
        return Err(Failure::usage("--dt must be positive and --seconds non-negative"));
    }
    if o.seed.is_empty() {
        return Err(Failure::usage("at least one --seed is required"));
    }
    for v in [o.neurons, o.synapses].into_iter().flatten() {
        if !(v >= 1.0) {
            return Err(Failure::usage("sizes must be at least 1"));
        }
    }
    Ok(())
}

pub fn execute(cli: Cli) -> Result<(), Failure> {
    let (mode, o) = match cli.command {
        Command::Sim(o) => (Mode::Sim, o),
        Command::Setup(o) => (Mode::Setup, o),
        Command::Scale(o) => (Mode::Scale, o),
    };
    let plan = plan(mode, &o)?;
    validate(&o, &plan)?;
    let tasks = thread_cap()?.unwrap_or(1);

    let mut rows = Vec::new();
    let mut scaling = Vec::new();
    for family in &plan.families {
        for &size in &plan.sizes {
            for &seed in &o.seed {
                let mut run = RunConfig::new(1, seed, plan.seconds);
                run.slice = o.slice_width;
                run.dt = o.dt;
                run.tasks = tasks;
                match plan.mode {
                    Mode::Scale => {
                        let bundle = family.bundle(size, o.dt)?;
                        let base = bundle.descriptor.expected_edges();
                        for r in bench::measure_scaling(family, base, &plan.workers, &run)? {
                            println!(
                                "{} {} G={} value={:.3} synapses={} ratio={:.3}",
                                r.experiment, r.model, r.workers, r.value, r.synapses, r.ratio
                            );
                            scaling.push(r);
                        }
                    }
                    Mode::Setup => {
                        for &g in &plan.workers {
                            run.workers = g;
                            let bundle = family.bundle(size, o.dt)?;
                            let r = bench::measure_setup(&bundle, &run)?;
                            println!(
                                "setup {} G={} neurons={} synapses={} seconds={:.3} throughput={:.3e}/s padding={:.3}",
                                family.name(),
                                g,
                                r.neurons,
                                r.synapses,
                                r.seconds,
                                r.throughput(),
                                r.memory.padding
                            );
                            rows.push(bench::setup_row(family, &run, &r));
                        }
                    }
                    Mode::Sim => {
                        for &g in &plan.workers {
                            run.workers = g;
                            let bundle = family.bundle(size, o.dt)?;
                            let (row, out) = bench::measure_sim(family, &bundle, &run)?;
                            println!(
                                "sim {} G={} neurons={} synapses={} spikes={} ratio={:.3} setup={:.3}s sync={:.3}s",
                                row.model,
                                g,
                                row.neurons,
                                row.synapses,
                                out.train.len(),
                                row.ratio,
                                row.setup_seconds,
                                row.sync_seconds
                            );
                            rows.push(row);
                        }
                    }
                }
            }
        }
    }
    if let Some(path) = &o.csv {
        if !rows.is_empty() {
            report::append(path, &rows)?;
        }
        if !scaling.is_empty() {
            report::append(&report::scaling_path(path), &scaling)?;
        }
    }
    Ok(())
}
