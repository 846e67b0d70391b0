//! Network construction from probabilistic connect rules.

mod build;
mod descriptor;
mod scope;
mod split;
mod width;

pub use build::{build_adjacency, build_adjacency_complete, build_scoped, generate_row, PAIR_DRAW_MIN_P};
pub use descriptor::{split_descriptor, ConnectRule, IdRange, TopologyDescriptor};
pub use scope::TargetScope;
pub use split::{split_adjacency, split_with_synapses};
pub use width::{estimate_width, width_for, WidthEstimate};
