use crate::adjacency::{aligned_width, AdjacencyList};
use crate::error::CoreResult;
use crate::pool::FieldPool;
use crate::NeuronId;

fn split_points(adj: &AdjacencyList, pivot: NeuronId) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..adj.rows()).map(move |i| {
        let row = adj.valid_row(i);
        (row.partition_point(|&t| t < pivot), row.len())
    })
}

fn halves(adj: &AdjacencyList, pivot: NeuronId) -> CoreResult<(AdjacencyList, AdjacencyList)> {
    let (mut lw, mut rw) = (0, 0);
    for (cut, len) in split_points(adj, pivot) {
        lw = lw.max(cut);
        rw = rw.max(len - cut);
    }
    Ok((
        AdjacencyList::new(adj.rows(), aligned_width(lw))?,
        AdjacencyList::new(adj.rows(), aligned_width(rw))?,
    ))
}

/// Splits every row at `pivot` (by binary search): targets below the pivot go
/// left, the rest right. Each half is re-padded to its own aligned width.
pub fn split_adjacency(
    adj: &AdjacencyList,
    pivot: NeuronId,
) -> CoreResult<(AdjacencyList, AdjacencyList)> {
    let (mut left, mut right) = halves(adj, pivot)?;
    for (i, (cut, len)) in split_points(adj, pivot).enumerate() {
        let row = adj.row(i);
        left.row_mut(i)[..cut].copy_from_slice(&row[..cut]);
        right.row_mut(i)[..len - cut].copy_from_slice(&row[cut..len]);
    }
    Ok((left, right))
}

/// Splits adjacency and synapse pool together, keeping the 1:1 mapping
/// between entry `(i, j)` and synapse `(i, j)` on both sides.
pub fn split_with_synapses(
    adj: &AdjacencyList,
    synapses: &FieldPool,
    pivot: NeuronId,
) -> CoreResult<((AdjacencyList, FieldPool), (AdjacencyList, FieldPool))> {
    let (left, right) = split_adjacency(adj, pivot)?;
    let mut lpool = FieldPool::new(synapses.schema(), left.rows() * left.width())?;
    let mut rpool = FieldPool::new(synapses.schema(), right.rows() * right.width())?;
    let w = adj.width();
    for (i, (cut, len)) in split_points(adj, pivot).enumerate() {
        for f in 0..synapses.field_count() {
            let src = &synapses.column(f)[i * w..i * w + len];
            lpool.column_mut(f)[i * left.width()..][..cut].copy_from_slice(&src[..cut]);
            rpool.column_mut(f)[i * right.width()..][..len - cut].copy_from_slice(&src[cut..]);
        }
    }
    Ok(((left, lpool), (right, rpool)))
}
