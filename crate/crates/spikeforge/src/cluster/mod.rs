//! Runs `G` workers in lockstep batches of `delay` steps.
//!
//! Each worker runs on its own thread and owns its `WorkerState`. The calling
//! thread is the coordinator: it starts every half-batch, gathers the end of
//! it from all workers (the barrier), reads spike counts and moves spike
//! payloads between workers along the [`SyncPlan`]. The payload produced by
//! one half is transferred while the next half runs, and handed to the
//! workers at the start of the half after that, which is the first one that
//! can need it.

pub mod audit;
pub mod wire;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use spikeforge_core::models::ModelBundle;
use spikeforge_core::{
    build_sync_plan, BatchSchedule, CoreError, Model, NeuronId, Partition, Step, SyncPlan,
    Transmission, WorkerConfig, WorkerState,
};
use thiserror::Error;

pub use audit::{Actor, AuditLog, AuditReport, Event, EventKind};

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("invalid cluster configuration: {0}")]
    InvalidConfig(String),
    #[error("worker {worker} failed to build its sub-network: {source}")]
    Build { worker: u32, source: CoreError },
    #[error("worker {worker} failed at step {step}: {message}")]
    WorkerFailed { worker: u32, step: Step, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterConfig {
    pub workers: u32,
    /// Slice width; `None` uses the default policy.
    pub slice: Option<u32>,
    pub seed: u64,
    /// Accumulation tasks per worker.
    pub tasks: usize,
    pub transmission: Transmission,
    /// Batches excluded from the timing totals.
    pub warmup_batches: usize,
    pub audit: bool,
}

impl ClusterConfig {
    pub fn new(workers: u32, seed: u64) -> Self {
        Self {
            workers,
            slice: None,
            seed,
            tasks: 1,
            transmission: Transmission::Deterministic,
            warmup_batches: 3,
            audit: false,
        }
    }

    pub fn partition(&self, neurons: u32) -> Result<Partition, ClusterError> {
        if self.workers == 0 {
            return Err(ClusterError::InvalidConfig("at least one worker is required".into()));
        }
        let p = match self.slice {
            Some(s) => Partition::new(neurons, self.workers, s),
            None => Partition::with_default_slices(neurons, self.workers),
        };
        p.map_err(|e| ClusterError::InvalidConfig(e.to_string()))
    }
}

/// Per-worker construction summary.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkerInfo {
    pub worker: u32,
    pub owned: u32,
    pub edges: u64,
    pub width: usize,
    pub adjacency_bytes: usize,
    pub memory_bytes: usize,
    pub padding: f64,
    pub overflow: u64,
    pub build_seconds: f64,
}

impl WorkerInfo {
    fn of<M: Model>(w: &WorkerState<M>, build: Duration) -> Self {
        let adj = w.adjacency();
        Self {
            worker: w.gid(),
            owned: w.owned_count(),
            edges: adj.edge_count() as u64,
            width: adj.width(),
            adjacency_bytes: adj.bytes(),
            memory_bytes: w.memory_bytes(),
            padding: adj.padding_fraction(),
            overflow: w.overflow(),
            build_seconds: build.as_secs_f64(),
        }
    }
}

/// Wall-clock timings of one batch.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BatchTiming {
    /// Slowest worker's compute time, summed over both halves.
    pub step_seconds: f64,
    /// Coordinator time spent reading counts and moving payloads.
    pub sync_seconds: f64,
    /// Part of the sync time that ran past the end of the overlapping half.
    pub exposed_sync_seconds: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimingStats {
    pub batches: Vec<BatchTiming>,
    pub warmup_batches: usize,
    /// Steps covered by the batches after warmup.
    pub measured_steps: u64,
}

impl TimingStats {
    fn measured(&self) -> &[BatchTiming] {
        let skip = if self.batches.len() > self.warmup_batches { self.warmup_batches } else { 0 };
        &self.batches[skip..]
    }

    pub fn wall_seconds(&self) -> f64 {
        self.measured().iter().map(|b| b.wall_seconds).sum()
    }

    pub fn step_seconds(&self) -> f64 {
        self.measured().iter().map(|b| b.step_seconds).sum()
    }

    pub fn sync_seconds(&self) -> f64 {
        self.measured().iter().map(|b| b.sync_seconds).sum()
    }

    /// Fraction of sync time hidden behind stepping.
    pub fn hidden_fraction(&self) -> f64 {
        let sync = self.sync_seconds();
        if sync == 0.0 {
            return 1.0;
        }
        1.0 - self.measured().iter().map(|b| b.exposed_sync_seconds).sum::<f64>() / sync
    }

    /// Wall-clock seconds per biological second over the measured batches.
    pub fn ratio(&self, dt: f64) -> f64 {
        let bio = self.measured_steps as f64 * dt;
        if bio == 0.0 {
            return 0.0;
        }
        self.wall_seconds() / bio
    }
}

#[derive(Debug)]
pub struct SimOutput {
    /// Every firing, ordered by (step, neuron).
    pub train: Vec<(Step, NeuronId)>,
    pub workers: Vec<WorkerInfo>,
    /// Wall time of the parallel build.
    pub setup_seconds: f64,
    pub timing: TimingStats,
    pub audit: Option<AuditLog>,
    pub steps: u32,
}

enum Command {
    Half { half: usize, steps: u32, deliver: Option<(usize, Vec<u8>)> },
    Stop,
}

struct Report {
    worker: u32,
    half: usize,
    payload: Vec<u8>,
    count: u64,
    compute: Duration,
    end: Instant,
}

type Reply = Result<Report, ClusterError>;

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".into())
}

fn worker_loop<M: Model>(
    mut w: WorkerState<M>,
    commands: mpsc::Receiver<Command>,
    replies: mpsc::Sender<Reply>,
    audit: Option<&AuditLog>,
) {
    let gid = w.gid();
    let actor = Actor::Worker(gid);
    let log = |kind| {
        if let Some(a) = audit {
            a.record(actor, kind)
        }
    };
    while let Ok(Command::Half { half, steps, deliver }) = commands.recv() {
        let result = catch_unwind(AssertUnwindSafe(|| {
            if let Some((from, bytes)) = deliver {
                for (t, ids) in wire::decode(&bytes) {
                    w.insert_remote(t, &ids);
                }
                log(EventKind::PayloadRead { half: from });
            }
            log(EventKind::HalfStart { half });
            let start = Instant::now();
            for _ in 0..steps {
                w.step();
            }
            let compute = start.elapsed();
            log(EventKind::HalfEnd { half });
            let sets = w.drain_outbox();
            let count = sets.iter().map(|(_, ids)| ids.len() as u64).sum();
            (wire::encode(&sets), count, compute)
        }));
        let reply = match result {
            Ok((payload, count, compute)) => {
                Ok(Report { worker: gid, half, payload, count, compute, end: Instant::now() })
            }
            Err(p) => Err(ClusterError::WorkerFailed { worker: gid, step: w.now(), message: panic_message(p) }),
        };
        let failed = reply.is_err();
        if replies.send(reply).is_err() || failed {
            return;
        }
    }
}

/// Result of moving one half's payloads along the plan.
struct Transfer {
    half: usize,
    /// One buffer per worker, each holding every spike of the half.
    merged: Vec<Vec<u8>>,
    seconds: f64,
    end: Instant,
}

fn transfer(plan: &SyncPlan, half: usize, mut payloads: Vec<Vec<u8>>, counts: &[u64], audit: Option<&AuditLog>) -> Transfer {
    let log = |kind| {
        if let Some(a) = audit {
            a.record(Actor::Coordinator, kind)
        }
    };
    let start = Instant::now();
    let total: u64 = counts.iter().sum();
    log(EventKind::Counts { half, total });
    log(EventKind::TransferStart { half });
    let copies = if total == 0 {
        payloads.iter_mut().for_each(Vec::clear);
        0
    } else {
        plan.apply(&mut payloads, |dst, src| wire::merge_into(dst, src));
        plan.copy_count()
    };
    log(EventKind::TransferEnd { half, copies });
    let end = Instant::now();
    Transfer { half, merged: payloads, seconds: (end - start).as_secs_f64(), end }
}

/// Length of half `h` for delay `d`.
fn half_len(schedule: &BatchSchedule, h: usize) -> u32 {
    if h % 2 == 0 {
        schedule.first_half()
    } else {
        schedule.second_half()
    }
}

/// Builds all workers in parallel, each generating only its own
/// sub-network.
pub fn build_workers<M: Model + Clone>(
    bundle: &ModelBundle<M>,
    config: &ClusterConfig,
) -> Result<(Vec<WorkerState<M>>, Vec<WorkerInfo>, f64), ClusterError> {
    let partition = config.partition(bundle.descriptor.neurons())?;
    let mut wc = WorkerConfig::new(config.seed, bundle.dt as f32, bundle.delay);
    wc.tasks = config.tasks.max(1);
    wc.transmission = config.transmission;
    let start = Instant::now();
    let built: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = (0..config.workers)
            .map(|g| {
                let model = bundle.model.clone();
                s.spawn(move || {
                    let t = Instant::now();
                    let w = WorkerState::build(model, &bundle.descriptor, partition, g, wc)
                        .map_err(|source| ClusterError::Build { worker: g, source })?;
                    let info = WorkerInfo::of(&w, t.elapsed());
                    Ok::<_, ClusterError>((w, info))
                })
            })
            .collect();
        handles
            .into_iter()
            .enumerate()
            .map(|(g, h)| {
                h.join().unwrap_or_else(|p| {
                    Err(ClusterError::WorkerFailed { worker: g as u32, step: 0, message: panic_message(p) })
                })
            })
            .collect()
    });
    let setup = start.elapsed().as_secs_f64();
    let mut workers = Vec::new();
    let mut infos = Vec::new();
    for b in built {
        let (w, i) = b?;
        workers.push(w);
        infos.push(i);
    }
    Ok((workers, infos, setup))
}

/// Builds the network on `config.workers` workers and simulates `steps`
/// steps.
pub fn simulate<M: Model + Clone>(
    bundle: &ModelBundle<M>,
    config: &ClusterConfig,
    steps: u32,
) -> Result<SimOutput, ClusterError> {
    let (workers, infos, setup_seconds) = build_workers(bundle, config)?;
    let mut out = run(workers, bundle.delay, config, steps)?;
    out.workers = infos;
    out.setup_seconds = setup_seconds;
    Ok(out)
}

/// Simulates already built workers, which must be at step 0 and form one
/// partition.
pub fn run<M: Model>(
    workers: Vec<WorkerState<M>>,
    delay: u32,
    config: &ClusterConfig,
    steps: u32,
) -> Result<SimOutput, ClusterError> {
    let g = workers.len();
    if g == 0 || workers.iter().enumerate().any(|(i, w)| w.gid() as usize != i || w.now() != 0) {
        return Err(ClusterError::InvalidConfig("workers must be fresh and ordered by id".into()));
    }
    let schedule = BatchSchedule::new(delay);
    let plan = build_sync_plan(g as u32);
    let audit = config.audit.then(AuditLog::new);
    let audit_ref = audit.as_ref();
    let log = |kind| {
        if let Some(a) = audit_ref {
            a.record(Actor::Coordinator, kind)
        }
    };

    let mut train = Vec::new();
    let mut timing = TimingStats { warmup_batches: config.warmup_batches, ..Default::default() };

    thread::scope(|s| -> Result<(), ClusterError> {
        let (reply_tx, reply_rx) = mpsc::channel::<Reply>();
        let mut senders = Vec::with_capacity(g);
        for w in workers {
            let (tx, rx) = mpsc::channel();
            let replies = reply_tx.clone();
            s.spawn(move || worker_loop(w, rx, replies, audit_ref));
            senders.push(tx);
        }
        drop(reply_tx);
        let stop = |senders: &[mpsc::Sender<Command>]| {
            for tx in senders {
                let _ = tx.send(Command::Stop);
            }
        };

        // Payloads of the previous half, waiting to be transferred, and the
        // transferred spikes of the half before it, waiting to be delivered.
        let mut produced: Option<(usize, Vec<Vec<u8>>, Vec<u64>)> = None;
        let mut ready: Option<Transfer> = None;
        let mut done = 0u32;
        let mut batch = BatchTiming::default();
        let mut half = 0usize;
        while done < steps {
            let len = half_len(&schedule, half).min(steps - done);
            let started = Instant::now();
            let mut deliver = ready.take().map(|t| (t.half, t.merged));
            for (k, tx) in senders.iter().enumerate() {
                let payload = deliver.as_mut().map(|(h, m)| (*h, std::mem::take(&mut m[k])));
                if tx.send(Command::Half { half, steps: len, deliver: payload }).is_err() {
                    break;
                }
            }

            let pending = produced.take().map(|(h, payloads, counts)| {
                let t = transfer(&plan, h, payloads, &counts, audit_ref);
                if let Some(first) = t.merged.first() {
                    for (step, ids) in wire::decode(first) {
                        train.extend(ids.into_iter().map(|id| (step, id)));
                    }
                }
                t
            });

            let mut payloads = vec![Vec::new(); g];
            let mut counts = vec![0u64; g];
            let mut compute = Duration::ZERO;
            let mut last_end = started;
            for _ in 0..g {
                let report = match reply_rx.recv() {
                    Ok(Ok(r)) => r,
                    Ok(Err(e)) => {
                        stop(&senders);
                        return Err(e);
                    }
                    Err(_) => {
                        stop(&senders);
                        return Err(ClusterError::WorkerFailed {
                            worker: u32::MAX,
                            step: done,
                            message: "worker exited".into(),
                        });
                    }
                };
                debug_assert_eq!(report.half, half);
                compute = compute.max(report.compute);
                last_end = last_end.max(report.end);
                counts[report.worker as usize] = report.count;
                payloads[report.worker as usize] = report.payload;
            }
            log(EventKind::Barrier { half });

            batch.step_seconds += compute.as_secs_f64();
            if let Some(t) = &pending {
                batch.sync_seconds += t.seconds;
                batch.exposed_sync_seconds += t.end.saturating_duration_since(last_end).as_secs_f64();
            }
            batch.wall_seconds += started.elapsed().as_secs_f64();
            if half % 2 == 1 || done + len == steps {
                if timing.batches.len() >= config.warmup_batches {
                    timing.measured_steps += (done + len - (half as u32 / 2) * delay) as u64;
                }
                timing.batches.push(std::mem::take(&mut batch));
            }

            produced = Some((half, payloads, counts));
            ready = pending;
            done += len;
            half += 1;
        }
        stop(&senders);
        if let Some((h, payloads, counts)) = produced {
            let t = transfer(&plan, h, payloads, &counts, audit_ref);
            if let Some(first) = t.merged.first() {
                for (step, ids) in wire::decode(first) {
                    train.extend(ids.into_iter().map(|id| (step, id)));
                }
            }
        }
        Ok(())
    })?;

    if timing.batches.len() <= config.warmup_batches {
        timing.measured_steps = steps as u64;
    }
    Ok(SimOutput { train, workers: Vec::new(), setup_seconds: 0.0, timing, audit, steps })
}
