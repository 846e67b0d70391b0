//! Multi-worker runtime, file formats and experiment harness for the
//! spikeforge engine.

pub mod alloc_counter;
pub mod bench;
pub mod cli;
pub mod cluster;
pub mod descriptor;
pub mod report;
