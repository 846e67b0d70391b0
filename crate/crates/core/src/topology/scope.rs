use crate::partition::Partition;
use crate::topology::IdRange;
use crate::NeuronId;

/// Which targets a worker materializes. Generation treats the scope as a
/// predicate, so any scope yields exactly the matching subset of the full
/// network's edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetScope {
    All,
    Range(IdRange),
    /// Targets owned by `worker` under a strided partition.
    Owned { partition: Partition, worker: u32 },
}

impl TargetScope {
    pub fn owned(partition: Partition, worker: u32) -> Self {
        TargetScope::Owned { partition, worker }
    }

    #[inline]
    pub fn contains(&self, id: NeuronId) -> bool {
        match self {
            TargetScope::All => true,
            TargetScope::Range(r) => r.contains(id),
            TargetScope::Owned { partition, worker } => partition.owner(id) == *worker,
        }
    }

    /// `|range ∩ scope|`.
    pub fn count_in(&self, range: IdRange) -> u64 {
        match self {
            TargetScope::All => range.len() as u64,
            TargetScope::Range(r) => range.intersect(*r).len() as u64,
            TargetScope::Owned { partition, worker } => partition.owned_in(*worker, range),
        }
    }

    /// Calls `f` on every contiguous run of `range ∩ scope`, ascending.
    pub fn for_each_run(&self, range: IdRange, mut f: impl FnMut(IdRange)) {
        match self {
            TargetScope::All => {
                if !range.is_empty() {
                    f(range)
                }
            }
            TargetScope::Range(r) => {
                let i = range.intersect(*r);
                if !i.is_empty() {
                    f(i)
                }
            }
            TargetScope::Owned { partition, worker } => {
                partition.owned_slices_in(*worker, range).for_each(f)
            }
        }
    }
}
