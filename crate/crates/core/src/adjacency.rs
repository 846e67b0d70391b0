use alloc::vec::Vec;

use crate::error::{CoreError, CoreResult};
use crate::pool::{checked_elements, try_alloc_words};

/// Padding value. Being the largest ID, it keeps padded rows sorted.
pub const SENTINEL: u32 = u32::MAX;

/// Row alignment in entries: 32 entries of 4 bytes is one 128-byte line.
pub const LANE: usize = 32;

/// Rounds an entry count up to the next multiple of [`LANE`].
#[inline]
pub const fn aligned_width(entries: usize) -> usize {
    entries.div_ceil(LANE) * LANE
}

/// Padded, row-sorted neighbor table. Row `i` lists the targets of neuron `i`
/// in ascending order followed by [`SENTINEL`]s; every row has the same
/// width, so no offset table is needed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyList {
    rows: usize,
    width: usize,
    entries: Vec<u32>,
}

impl AdjacencyList {
    pub fn new(rows: usize, width: usize) -> CoreResult<Self> {
        if width % LANE != 0 {
            return Err(CoreError::UnalignedWidth(width));
        }
        let len = checked_elements("adjacency list", rows, width)?;
        Ok(Self { rows, width, entries: try_alloc_words("adjacency list", len, SENTINEL)? })
    }

    /// Builds a list from explicit rows, sorting each and padding to the
    /// smallest aligned width that fits the longest row.
    pub fn from_rows(rows: &[Vec<u32>]) -> CoreResult<Self> {
        let width = aligned_width(rows.iter().map(Vec::len).max().unwrap_or(0));
        let mut adj = Self::new(rows.len(), width)?;
        for (i, row) in rows.iter().enumerate() {
            let dst = &mut adj.row_mut(i)[..row.len()];
            dst.copy_from_slice(row);
            dst.sort_unstable();
        }
        Ok(adj)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.width..(i + 1) * self.width]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u32] {
        &mut self.entries[i * self.width..(i + 1) * self.width]
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [u32] {
        &mut self.entries
    }

    /// Number of non-sentinel entries in row `i`.
    #[inline]
    pub fn valid_len(&self, i: usize) -> usize {
        self.row(i).partition_point(|&t| t != SENTINEL)
    }

    #[inline]
    pub fn valid_row(&self, i: usize) -> &[u32] {
        let row = self.row(i);
        &row[..row.partition_point(|&t| t != SENTINEL)]
    }

    /// Total number of edges (valid entries).
    pub fn edge_count(&self) -> usize {
        (0..self.rows).map(|i| self.valid_len(i)).sum()
    }

    /// Bytes of adjacency data: rows × width × 4.
    pub fn bytes(&self) -> usize {
        self.entries.len() * 4
    }

    /// Fraction of slots holding padding rather than edges.
    pub fn padding_fraction(&self) -> f64 {
        if self.entries.is_empty() {
            return 0.0;
        }
        1.0 - self.edge_count() as f64 / self.entries.len() as f64
    }

    /// Checks the layout invariants by linear scan: rows ascending, sentinels
    /// only in the suffix, every valid target below `neurons`.
    pub fn check_invariants(&self, neurons: usize) -> Result<(), &'static str> {
        if self.width % LANE != 0 {
            return Err("width is not lane-aligned");
        }
        for i in 0..self.rows {
            let row = self.row(i);
            let valid = self.valid_len(i);
            if row[valid..].iter().any(|&t| t != SENTINEL) {
                return Err("sentinel followed by a valid entry");
            }
            if row[..valid].windows(2).any(|w| w[0] > w[1]) {
                return Err("row not sorted");
            }
            if row[..valid].iter().any(|&t| t as usize >= neurons) {
                return Err("target out of range");
            }
        }
        Ok(())
    }
}
