//! CSV output. Files are appended to; the header is written only when the
//! file is new or empty.

use std::fs::OpenOptions;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// One simulation or setup measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub schema_version: u32,
    pub experiment: String,
    pub model: String,
    pub neurons: u32,
    pub synapses: u64,
    pub workers: u32,
    pub slice_width: u32,
    pub seed: u64,
    pub bio_seconds: f64,
    pub wall_seconds: f64,
    pub ratio: f64,
    pub setup_seconds: f64,
    pub sync_seconds: f64,
    pub mem_bytes: u64,
}

/// One speedup or scaleup point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub schema_version: u32,
    pub experiment: String,
    pub model: String,
    pub workers: u32,
    pub seed: u64,
    pub base_synapses: u64,
    pub synapses: u64,
    /// Speedup or scaleup factor.
    pub value: f64,
    pub base_ratio: f64,
    pub ratio: f64,
}

/// `results.csv` → `results_scaling.csv`.
pub fn scaling_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}_scaling.{ext}"))
}

pub fn append<T: Serialize>(path: &Path, rows: &[T]) -> io::Result<()> {
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let fresh = file.metadata()?.len() == 0;
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    for r in rows {
        w.serialize(r).map_err(io::Error::other)?;
    }
    w.flush()
}
