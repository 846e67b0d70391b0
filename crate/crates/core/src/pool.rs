//! Field-major ("struct of arrays") storage for neuron and synapse state.
//!
//! A pool holds one contiguous column per model field. Every field is a
//! 32-bit word; `f32` fields are stored by bit pattern so reads return exactly
//! what was written.

use alloc::vec::Vec;

use crate::adjacency::AdjacencyList;
use crate::error::{CoreError, CoreResult};
use crate::model::{Edge, Model};
use crate::rng::KeyedRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    F32,
    U32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldSpec {
    pub name: &'static str,
    pub kind: FieldKind,
}

impl FieldSpec {
    pub const fn f32(name: &'static str) -> Self {
        Self { name, kind: FieldKind::F32 }
    }

    pub const fn u32(name: &'static str) -> Self {
        Self { name, kind: FieldKind::U32 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldPool {
    len: usize,
    schema: Vec<FieldSpec>,
    columns: Vec<Vec<u32>>,
}

pub(crate) fn try_alloc_words(what: &'static str, len: usize, fill: u32) -> CoreResult<Vec<u32>> {
    let mut v = Vec::new();
    v.try_reserve_exact(len).map_err(|_| CoreError::AllocationFailed {
        what,
        bytes: len as u128 * 4,
    })?;
    v.resize(len, fill);
    Ok(v)
}

pub(crate) fn checked_elements(what: &'static str, a: usize, b: usize) -> CoreResult<usize> {
    let n = a as u128 * b as u128;
    // Words are 4 bytes and no allocation may exceed isize::MAX bytes.
    if n * 4 > isize::MAX as u128 {
        return Err(CoreError::CapacityOverflow { what, elements: n });
    }
    Ok(n as usize)
}

impl FieldPool {
    /// Zero-initialized pool of `len` records.
    pub fn new(schema: &[FieldSpec], len: usize) -> CoreResult<Self> {
        checked_elements("pool", len, schema.len().max(1))?;
        let columns = schema
            .iter()
            .map(|_| try_alloc_words("pool column", len, 0))
            .collect::<CoreResult<Vec<_>>>()?;
        Ok(Self { len, schema: schema.to_vec(), columns })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn schema(&self) -> &[FieldSpec] {
        &self.schema
    }

    pub fn field_count(&self) -> usize {
        self.columns.len()
    }

    pub fn bytes(&self) -> usize {
        self.len * self.columns.len() * 4
    }

    pub fn column(&self, field: usize) -> &[u32] {
        &self.columns[field]
    }

    pub fn column_mut(&mut self, field: usize) -> &mut [u32] {
        &mut self.columns[field]
    }

    #[inline]
    pub fn get_u32(&self, field: usize, i: usize) -> u32 {
        self.columns[field][i]
    }

    #[inline]
    pub fn set_u32(&mut self, field: usize, i: usize, v: u32) {
        self.columns[field][i] = v;
    }

    #[inline]
    pub fn get_f32(&self, field: usize, i: usize) -> f32 {
        f32::from_bits(self.columns[field][i])
    }

    #[inline]
    pub fn set_f32(&mut self, field: usize, i: usize, v: f32) {
        self.columns[field][i] = v.to_bits();
    }

    pub fn columns(&self) -> Vec<&[u32]> {
        self.columns.iter().map(|c| c.as_slice()).collect()
    }

    pub fn columns_mut(&mut self) -> Vec<&mut [u32]> {
        self.columns.iter_mut().map(|c| c.as_mut_slice()).collect()
    }

    /// Splits every column at the same record boundaries. `bounds` must be
    /// ascending, start at 0 and end at `len`; chunk `k` covers
    /// `bounds[k]..bounds[k + 1]`.
    pub fn split_mut(&mut self, bounds: &[usize]) -> Vec<Vec<&mut [u32]>> {
        assert!(bounds.len() >= 2 && bounds[0] == 0 && *bounds.last().unwrap() == self.len);
        let chunks = bounds.len() - 1;
        let mut out: Vec<Vec<&mut [u32]>> =
            (0..chunks).map(|_| Vec::with_capacity(self.columns.len())).collect();
        for col in self.columns.iter_mut() {
            let mut rest = col.as_mut_slice();
            for k in 0..chunks {
                let (head, tail) = rest.split_at_mut(bounds[k + 1] - bounds[k]);
                out[k].push(head);
                rest = tail;
            }
        }
        out
    }
}

/// Mutable view of one record across all columns.
pub struct RecordMut<'r, 'a> {
    cols: &'r mut [&'a mut [u32]],
    index: usize,
}

impl<'r, 'a> RecordMut<'r, 'a> {
    #[inline]
    pub fn new(cols: &'r mut [&'a mut [u32]], index: usize) -> Self {
        Self { cols, index }
    }

    #[inline]
    pub fn f32(&self, field: usize) -> f32 {
        f32::from_bits(self.cols[field][self.index])
    }

    #[inline]
    pub fn set_f32(&mut self, field: usize, v: f32) {
        self.cols[field][self.index] = v.to_bits();
    }

    #[inline]
    pub fn u32(&self, field: usize) -> u32 {
        self.cols[field][self.index]
    }

    #[inline]
    pub fn set_u32(&mut self, field: usize, v: u32) {
        self.cols[field][self.index] = v;
    }
}

/// Read-only view of one record.
#[derive(Clone, Copy)]
pub struct RecordRef<'r, 'a> {
    cols: &'r [&'a [u32]],
    index: usize,
}

impl<'r, 'a> RecordRef<'r, 'a> {
    #[inline]
    pub fn new(cols: &'r [&'a [u32]], index: usize) -> Self {
        Self { cols, index }
    }

    #[inline]
    pub fn f32(&self, field: usize) -> f32 {
        f32::from_bits(self.cols[field][self.index])
    }

    #[inline]
    pub fn u32(&self, field: usize) -> u32 {
        self.cols[field][self.index]
    }
}

/// Allocates and initializes the neuron pool (`n` records) and the synapse
/// pool (`rows * width` records, 1:1 with adjacency entries).
pub fn make_pools<M: Model>(
    model: &M,
    n: usize,
    adjacency: &AdjacencyList,
    seed: u64,
) -> CoreResult<(FieldPool, FieldPool)> {
    if n == 0 {
        return Err(CoreError::EmptyNetwork);
    }
    if adjacency.rows() != n {
        return Err(CoreError::RowMismatch { rows: adjacency.rows(), neurons: n });
    }
    let mut neurons = FieldPool::new(model.neuron_fields(), n)?;
    {
        let mut cols = neurons.columns_mut();
        for id in 0..n {
            let mut rng = KeyedRng::for_neuron_init(seed, id as u32);
            model.init_neuron(id as u32, &mut RecordMut::new(&mut cols, id), &mut rng);
        }
    }

    let capacity = checked_elements("synapse pool", adjacency.rows(), adjacency.width())?;
    let mut synapses = FieldPool::new(model.synapse_fields(), capacity)?;
    if synapses.field_count() > 0 {
        let mut cols = synapses.columns_mut();
        let width = adjacency.width();
        for src in 0..adjacency.rows() {
            for (j, &dst) in adjacency.valid_row(src).iter().enumerate() {
                let edge = Edge { src: src as u32, dst };
                model.init_synapse(edge, &mut RecordMut::new(&mut cols, src * width + j));
            }
        }
    }
    Ok((neurons, synapses))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHEMA: [FieldSpec; 2] = [FieldSpec::f32("v"), FieldSpec::u32("count")];

    #[test]
    fn layout_arithmetic() {
        let neurons = FieldPool::new(&SCHEMA, 10).unwrap();
        let synapses = FieldPool::new(&SCHEMA, 10 * 6).unwrap();
        assert_eq!(neurons.field_count(), 2);
        assert_eq!(neurons.column(0).len(), 10);
        assert_eq!(neurons.column(1).len(), 10);
        assert_eq!(synapses.column(0).len(), 60);
        assert_eq!(synapses.column(1).len(), 60);
        assert_eq!(synapses.bytes(), 60 * 2 * 4);
    }

    #[test]
    fn overflow_is_a_construction_error() {
        assert!(matches!(
            checked_elements("x", usize::MAX, 2),
            Err(CoreError::CapacityOverflow { .. })
        ));
    }

    #[test]
    fn split_mut_partitions_every_column() {
        let mut pool = FieldPool::new(&SCHEMA, 7).unwrap();
        {
            let mut chunks = pool.split_mut(&[0, 3, 3, 7]);
            assert_eq!(chunks.len(), 3);
            assert_eq!(chunks[1][0].len(), 0);
            for (k, chunk) in chunks.iter_mut().enumerate() {
                for col in chunk.iter_mut() {
                    for w in col.iter_mut() {
                        *w = k as u32;
                    }
                }
            }
        }
        assert_eq!(pool.column(1), &[0, 0, 0, 2, 2, 2, 2]);
    }

    #[test]
    fn record_views() {
        let mut pool = FieldPool::new(&SCHEMA, 4).unwrap();
        {
            let mut cols = pool.columns_mut();
            let mut r = RecordMut::new(&mut cols, 2);
            r.set_f32(0, -1.5);
            r.set_u32(1, 9);
        }
        assert_eq!(pool.get_f32(0, 2), -1.5);
        let cols = pool.columns();
        let r = RecordRef::new(&cols, 2);
        assert_eq!(r.u32(1), 9);
    }
}
