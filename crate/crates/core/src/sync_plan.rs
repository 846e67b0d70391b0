//! Hierarchical spike exchange: spike sets are gathered pairwise up a binary
//! tree until two workers each hold half of everything, those two swap in one
//! full-duplex round, and the result is scattered back down the tree.

use alloc::vec::Vec;

/// Copy the current spike set of `src` into `dst` (union).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CopyOp {
    pub src: u32,
    pub dst: u32,
}

/// Rounds of copy operations. Copies within a round are independent: all read
/// the state from before the round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncPlan {
    workers: u32,
    rounds: Vec<Vec<CopyOp>>,
}

/// Builds the plan for `workers` workers. Non-power-of-two counts are padded
/// with phantom workers that hold nothing; copies touching them are elided.
pub fn build_sync_plan(workers: u32) -> SyncPlan {
    assert!(workers >= 1);
    let padded = workers.next_power_of_two();
    let levels = padded.trailing_zeros();
    let mut rounds: Vec<Vec<CopyOp>> = Vec::new();
    let real = |ops: Vec<CopyOp>| -> Vec<CopyOp> {
        ops.into_iter().filter(|op| op.src < workers && op.dst < workers).collect()
    };

    if levels >= 1 {
        for r in 0..levels - 1 {
            let stride = 1u32 << r;
            let ops = (0..padded)
                .step_by(2 * stride as usize)
                .map(|i| CopyOp { src: i + stride, dst: i })
                .collect();
            rounds.push(real(ops));
        }
        let half = padded / 2;
        rounds.push(real(alloc::vec![CopyOp { src: half, dst: 0 }, CopyOp { src: 0, dst: half }]));
        for r in (0..levels - 1).rev() {
            let stride = 1u32 << r;
            let ops = (0..padded)
                .step_by(2 * stride as usize)
                .map(|i| CopyOp { src: i, dst: i + stride })
                .collect();
            rounds.push(real(ops));
        }
    }
    rounds.retain(|r| !r.is_empty());
    SyncPlan { workers, rounds }
}

impl SyncPlan {
    pub fn workers(&self) -> u32 {
        self.workers
    }

    pub fn rounds(&self) -> &[Vec<CopyOp>] {
        &self.rounds
    }

    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    pub fn copy_count(&self) -> usize {
        self.rounds.iter().map(Vec::len).sum()
    }

    /// Runs the plan over per-worker states. `merge(dst, src)` folds a copy of
    /// `src` into `dst`.
    pub fn apply<S: Clone>(&self, state: &mut [S], mut merge: impl FnMut(&mut S, &S)) {
        assert_eq!(state.len(), self.workers as usize);
        for round in &self.rounds {
            let sources: Vec<S> = round.iter().map(|op| state[op.src as usize].clone()).collect();
            for (op, src) in round.iter().zip(&sources) {
                merge(&mut state[op.dst as usize], src);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use alloc::vec;

    fn union(a: &mut BTreeSet<char>, b: &BTreeSet<char>) {
        a.extend(b.iter().copied());
    }

    #[test]
    fn four_workers_follow_the_tree() {
        let plan = build_sync_plan(4);
        assert_eq!(plan.round_count(), 3);
        let mut sets: Vec<BTreeSet<char>> =
            ['a', 'b', 'c', 'd'].iter().map(|&c| BTreeSet::from([c])).collect();
        let all: BTreeSet<char> = "abcd".chars().collect();

        let single = |r: usize| SyncPlan { workers: 4, rounds: vec![plan.rounds()[r].clone()] };
        single(0).apply(&mut sets, union);
        assert_eq!(sets[0], "ab".chars().collect());
        assert_eq!(sets[1], "b".chars().collect());
        assert_eq!(sets[2], "cd".chars().collect());
        assert_eq!(sets[3], "d".chars().collect());
        single(1).apply(&mut sets, union);
        assert_eq!(sets[0], all);
        assert_eq!(sets[2], all);
        assert_eq!(sets[1], "b".chars().collect());
        single(2).apply(&mut sets, union);
        assert!(sets.iter().all(|s| *s == all));
    }

    #[test]
    fn small_cases() {
        assert_eq!(build_sync_plan(1).round_count(), 0);
        let two = build_sync_plan(2);
        assert_eq!(two.rounds(), &[vec![CopyOp { src: 1, dst: 0 }, CopyOp { src: 0, dst: 1 }]]);
        assert_eq!(build_sync_plan(8).round_count(), 5);
        assert_eq!(build_sync_plan(3).round_count(), 3);
    }

    #[test]
    fn round_count_monotone() {
        let counts: Vec<usize> = (1..=64).map(|g| build_sync_plan(g).round_count()).collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]));
    }
}
