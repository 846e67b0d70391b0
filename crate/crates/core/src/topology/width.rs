use alloc::vec;
use alloc::vec::Vec;

use crate::adjacency::aligned_width;
use crate::topology::{TargetScope, TopologyDescriptor};

/// Per-neuron out-degree moments and the padded row width derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct WidthEstimate {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub width: usize,
}

impl WidthEstimate {
    /// `μ_i + 3σ_i` for neuron `i`, before alignment.
    pub fn bound(&self, i: usize) -> f64 {
        self.mean[i] + 3.0 * libm::sqrt(self.variance[i])
    }

    pub fn max_bound(&self) -> f64 {
        (0..self.mean.len()).map(|i| self.bound(i)).fold(0.0, f64::max)
    }
}

/// Out-degrees are binomial; each rule containing neuron `i` in its source
/// range contributes `k·p` to the mean and `k·p·(1−p)` to the variance, with
/// `k = |dst ∩ scope|`. The width is `max_i(μ_i + 3σ_i)` rounded up to a
/// whole number of lanes.
pub fn estimate_width(desc: &TopologyDescriptor, scope: &TargetScope) -> WidthEstimate {
    let n = desc.neurons() as usize;
    let mut mean = vec![0.0f64; n];
    let mut variance = vec![0.0f64; n];
    for rule in desc.rules() {
        let k = scope.count_in(rule.dst) as f64;
        if k == 0.0 || rule.p == 0.0 {
            continue;
        }
        let m = k * rule.p;
        let v = k * rule.p * (1.0 - rule.p);
        for i in rule.src.start as usize..rule.src.end as usize {
            mean[i] += m;
            variance[i] += v;
        }
    }
    WidthEstimate { mean, variance, width: width_for(desc, scope) }
}

/// The width of [`estimate_width`] without per-neuron storage: moments are
/// constant between consecutive rule boundaries, so only those segments are
/// visited.
pub fn width_for(desc: &TopologyDescriptor, scope: &TargetScope) -> usize {
    let mut cuts: Vec<u32> = desc.rules().iter().flat_map(|r| [r.src.start, r.src.end]).collect();
    cuts.sort_unstable();
    cuts.dedup();
    let mut bound = 0.0f64;
    for seg in cuts.windows(2) {
        let (mut m, mut v) = (0.0f64, 0.0f64);
        for rule in desc.rules() {
            let k = scope.count_in(rule.dst) as f64;
            if k == 0.0 || rule.p == 0.0 || rule.src.start > seg[0] || rule.src.end < seg[1] {
                continue;
            }
            m += k * rule.p;
            v += k * rule.p * (1.0 - rule.p);
        }
        bound = bound.max(m + 3.0 * libm::sqrt(v));
    }
    // Absorb summation round-off so an exact integer bound is not bumped up.
    aligned_width(libm::ceil(bound - 1e-9).max(0.0) as usize)
}
