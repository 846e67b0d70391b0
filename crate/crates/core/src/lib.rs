//! Allocation-only core of the spikeforge spiking-network engine.
//!
//! Everything here is pure computation over in-memory structures:
//! field-major neuron/synapse pools, the padded adjacency list, delay rings,
//! descriptor-driven network construction, strided partitioning, the
//! hierarchical spike-sync plan and the per-worker simulation loop.
//! Threads, clocks, files and the CLI live in the `spikeforge` crate.
//!
//! The crate is `no_std` unless the `std` feature is enabled; `parallel`
//! additionally runs per-worker data-parallel phases on rayon.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod adjacency;
pub mod engine;
mod error;
pub mod models;
mod model;
mod partition;
mod pool;
mod ring;
pub mod rng;
mod schedule;
mod sync_plan;
pub mod topology;

pub use adjacency::{AdjacencyList, LANE, SENTINEL};
pub use engine::{Overflow, StepStats, Transmission, WorkerConfig, WorkerState};
pub use error::{CoreError, CoreResult};
pub use model::{Delivery, Edge, Model, SpikeTiming, UpdateCtx};
pub use partition::{default_slice_width, Partition};
pub use pool::{make_pools, FieldKind, FieldPool, FieldSpec, RecordMut, RecordRef};
pub use ring::{SpikeArray, SpikeRing};
pub use schedule::BatchSchedule;
pub use sync_plan::{build_sync_plan, CopyOp, SyncPlan};
pub use topology::{
    build_adjacency, build_adjacency_complete, estimate_width, width_for, split_adjacency, split_descriptor, ConnectRule, IdRange,
    TargetScope, TopologyDescriptor, WidthEstimate,
};

/// Neuron identifier. Global across all workers.
pub type NeuronId = u32;

/// Simulation step index.
pub type Step = u32;
