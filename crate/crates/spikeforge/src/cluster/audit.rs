//! Happens-before log of a cluster run and the checks run over it.
//!
//! Half-batches are numbered globally: half `h` belongs to batch `h / 2` and
//! is the first half when `h` is even. The payload produced by half `h` is
//! transferred while half `h + 1` runs and read at the start of half `h + 2`.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Actor {
    Coordinator,
    Worker(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    HalfStart { half: usize },
    HalfEnd { half: usize },
    /// All workers reported the end of `half`.
    Barrier { half: usize },
    /// Spike counts of `half` were read; `total` spikes across workers.
    Counts { half: usize, total: u64 },
    TransferStart { half: usize },
    TransferEnd { half: usize, copies: usize },
    /// A worker inserted the synced spikes of `half` into its ring.
    PayloadRead { half: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub at: Instant,
    pub actor: Actor,
    pub kind: EventKind,
}

#[derive(Debug, Default)]
pub struct AuditLog {
    events: Mutex<Vec<Event>>,
}

impl AuditLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&self, actor: Actor, kind: EventKind) {
        let at = Instant::now();
        self.events.lock().unwrap().push(Event { at, actor, kind });
    }

    /// Events ordered by timestamp.
    pub fn events(&self) -> Vec<Event> {
        let mut events = self.events.lock().unwrap().clone();
        events.sort_by_key(|e| e.at);
        events
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AuditReport {
    /// Payload reads that did not follow the end barrier of the half after
    /// the one that produced them, or the end of their transfer.
    pub early_reads: usize,
    /// First-half payloads with at least one spike.
    pub transfers: usize,
    /// Of those, transfers whose interval overlapped some worker's
    /// second-half step interval.
    pub overlapped: usize,
}

impl AuditReport {
    pub fn overlap_fraction(&self) -> f64 {
        if self.transfers == 0 {
            return 0.0;
        }
        self.overlapped as f64 / self.transfers as f64
    }
}

pub fn check(events: &[Event]) -> AuditReport {
    let mut barrier = HashMap::new();
    let mut transfer: HashMap<usize, (Option<Instant>, Option<(Instant, usize)>)> = HashMap::new();
    let mut starts = HashMap::new();
    let mut intervals: HashMap<usize, Vec<(Instant, Instant)>> = HashMap::new();
    for e in events {
        match e.kind {
            EventKind::Barrier { half } => {
                barrier.insert(half, e.at);
            }
            EventKind::TransferStart { half } => transfer.entry(half).or_default().0 = Some(e.at),
            EventKind::TransferEnd { half, copies } => {
                transfer.entry(half).or_default().1 = Some((e.at, copies))
            }
            EventKind::HalfStart { half } => {
                starts.insert((e.actor, half), e.at);
            }
            EventKind::HalfEnd { half } => {
                if let Some(s) = starts.remove(&(e.actor, half)) {
                    intervals.entry(half).or_default().push((s, e.at));
                }
            }
            _ => {}
        }
    }

    let mut report = AuditReport::default();
    for e in events {
        if let EventKind::PayloadRead { half } = e.kind {
            let after_barrier = barrier.get(&(half + 1)).is_some_and(|&b| b <= e.at);
            let after_transfer =
                transfer.get(&half).and_then(|t| t.1).is_some_and(|(end, _)| end <= e.at);
            report.early_reads += !(after_barrier && after_transfer) as usize;
        }
    }
    for (&half, &(start, end)) in &transfer {
        let (Some(start), Some((end, copies))) = (start, end) else { continue };
        if half % 2 != 0 || copies == 0 {
            continue;
        }
        report.transfers += 1;
        let steps = intervals.get(&(half + 1)).map(Vec::as_slice).unwrap_or(&[]);
        report.overlapped += steps.iter().any(|&(s, t)| s < end && start < t) as usize;
    }
    report
}
