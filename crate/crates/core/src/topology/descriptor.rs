use alloc::vec::Vec;
use core::fmt;

use crate::error::{CoreError, CoreResult};
use crate::NeuronId;

/// Half-open range of neuron IDs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IdRange {
    pub start: NeuronId,
    pub end: NeuronId,
}

impl IdRange {
    pub const fn new(start: NeuronId, end: NeuronId) -> Self {
        Self { start, end }
    }

    pub const fn len(&self) -> u32 {
        self.end.saturating_sub(self.start)
    }

    pub const fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    #[inline]
    pub const fn contains(&self, id: NeuronId) -> bool {
        self.start <= id && id < self.end
    }

    pub fn intersect(&self, other: IdRange) -> IdRange {
        let start = self.start.max(other.start);
        let end = self.end.min(other.end).max(start);
        IdRange { start, end }
    }
}

impl fmt::Display for IdRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

/// Connect every neuron of `src` to every neuron of `dst` with probability `p`.
///
/// `key` names the rule's random stream and `origin` is where its
/// geometric-skip walk starts; both survive [`split_descriptor`] unchanged so
/// a split network draws exactly the edges the whole network would.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectRule {
    pub src: IdRange,
    pub dst: IdRange,
    pub p: f64,
    pub key: u32,
    pub origin: NeuronId,
}

impl ConnectRule {
    pub fn new(src: IdRange, dst: IdRange, p: f64) -> Self {
        Self { src, dst, p, key: 0, origin: dst.start }
    }
}

/// Ordered list of connect rules over `neurons` neurons.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TopologyDescriptor {
    neurons: u32,
    rules: Vec<ConnectRule>,
}

impl TopologyDescriptor {
    /// Validates the rules and assigns each its position as stream key.
    pub fn new(neurons: u32, rules: impl IntoIterator<Item = ConnectRule>) -> CoreResult<Self> {
        let rules: Vec<ConnectRule> = rules
            .into_iter()
            .enumerate()
            .map(|(i, r)| ConnectRule { key: i as u32, origin: r.dst.start, ..r })
            .collect();
        let desc = Self { neurons, rules };
        desc.validate()?;
        Ok(desc)
    }

    /// Like [`TopologyDescriptor::new`], with the neuron count taken as the
    /// largest range end.
    pub fn from_rules(rules: impl IntoIterator<Item = ConnectRule>) -> CoreResult<Self> {
        let rules: Vec<ConnectRule> = rules.into_iter().collect();
        let neurons = rules.iter().map(|r| r.src.end.max(r.dst.end)).max().unwrap_or(0);
        Self::new(neurons, rules)
    }

    pub(crate) fn with_rules_unchecked(neurons: u32, rules: Vec<ConnectRule>) -> Self {
        Self { neurons, rules }
    }

    pub fn neurons(&self) -> u32 {
        self.neurons
    }

    pub fn rules(&self) -> &[ConnectRule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn validate(&self) -> CoreResult<()> {
        for r in &self.rules {
            if r.src.start > r.src.end || r.dst.start > r.dst.end {
                return Err(CoreError::InvalidTopology("range start exceeds its end"));
            }
            if r.src.end > self.neurons || r.dst.end > self.neurons {
                return Err(CoreError::InvalidTopology("range exceeds the neuron count"));
            }
            if !(0.0..=1.0).contains(&r.p) {
                return Err(CoreError::InvalidTopology("probability outside [0, 1]"));
            }
        }
        Ok(())
    }

    /// Expected number of edges over the full target ranges.
    pub fn expected_edges(&self) -> f64 {
        self.rules.iter().map(|r| r.src.len() as f64 * r.dst.len() as f64 * r.p).sum()
    }
}

/// Splits a descriptor at `pivot`: the first half keeps targets below the
/// pivot, the second the rest. Rules with nothing left are dropped.
pub fn split_descriptor(
    desc: &TopologyDescriptor,
    pivot: NeuronId,
) -> (TopologyDescriptor, TopologyDescriptor) {
    let pivot = pivot.min(desc.neurons);
    let side = |clip: IdRange| {
        let rules = desc
            .rules
            .iter()
            .filter_map(|r| {
                let dst = r.dst.intersect(clip);
                (!dst.is_empty()).then_some(ConnectRule { dst, ..*r })
            })
            .collect();
        TopologyDescriptor::with_rules_unchecked(desc.neurons, rules)
    };
    (side(IdRange::new(0, pivot)), side(IdRange::new(pivot, desc.neurons)))
}
