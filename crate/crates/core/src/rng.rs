//! Counter-based random numbers.
//!
//! Every random decision in the simulator is a pure function of a 64-bit seed
//! and a 128-bit counter that names the decision (which neuron, which step,
//! which edge). Nothing is carried between draws, so results never depend on
//! which worker or task happens to make the draw.

/// Philox4x32 with 10 rounds.
pub fn philox4x32(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    const M0: u32 = 0xD251_1F53;
    const M1: u32 = 0xCD9E_8D57;
    const W0: u32 = 0x9E37_79B9;
    const W1: u32 = 0xBB67_AE85;

    #[inline(always)]
    fn mulhilo(a: u32, b: u32) -> (u32, u32) {
        let p = (a as u64) * (b as u64);
        ((p >> 32) as u32, p as u32)
    }

    let mut c = counter;
    let mut k = key;
    for round in 0..10 {
        if round > 0 {
            k[0] = k[0].wrapping_add(W0);
            k[1] = k[1].wrapping_add(W1);
        }
        let (hi0, lo0) = mulhilo(M0, c[0]);
        let (hi1, lo1) = mulhilo(M1, c[2]);
        c = [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0];
    }
    c
}

/// Draw domains. Each occupies the low nibble of counter word 2 so streams
/// for different purposes never collide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum Domain {
    NeuronStep = 1,
    NeuronInit = 2,
    EdgePair = 3,
    EdgeRow = 4,
    Test = 15,
}

#[inline]
fn key_of(seed: u64) -> [u32; 2] {
    [seed as u32, (seed >> 32) as u32]
}

#[inline]
fn tag(domain: Domain, aux: u32) -> u32 {
    debug_assert!(aux < (1 << 28));
    (aux << 4) | domain as u32
}

/// A sequential stream of draws under one (seed, a, b, domain, aux) name.
///
/// A stream normally consumes all four words of each Philox block. Neuron
/// step streams are lane streams instead: neurons `4k..4k+4` share the blocks
/// of counter `k`, each taking one word per block, so a loop over consecutive
/// neurons pays for one block per four neurons.
#[derive(Debug, Clone)]
pub struct KeyedRng {
    key: [u32; 2],
    ctr: [u32; 3],
    block: u32,
    buf: [u32; 4],
    pos: u8,
    start: u8,
    end: u8,
}

impl KeyedRng {
    pub fn new(seed: u64, a: u32, b: u32, domain: Domain, aux: u32) -> Self {
        Self { key: key_of(seed), ctr: [a, b, tag(domain, aux)], block: 0, buf: [0; 4], pos: 4, start: 0, end: 4 }
    }

    /// Per-neuron, per-step stream used by update callbacks.
    pub fn for_neuron_step(seed: u64, neuron: u32, step: u32) -> Self {
        let lane = (neuron & 3) as u8;
        Self {
            key: key_of(seed),
            ctr: [neuron >> 2, step, tag(Domain::NeuronStep, 0)],
            block: 0,
            buf: [0; 4],
            pos: lane + 1,
            start: lane,
            end: lane + 1,
        }
    }

    /// First block shared by the step streams of neurons `4k..4k+4`, where
    /// `k = neuron >> 2`.
    #[inline]
    pub fn neuron_step_block(seed: u64, neuron: u32, step: u32) -> [u32; 4] {
        philox4x32([neuron >> 2, step, tag(Domain::NeuronStep, 0), 0], key_of(seed))
    }

    /// [`KeyedRng::for_neuron_step`] with its first block already computed
    /// by [`KeyedRng::neuron_step_block`].
    #[inline]
    pub fn for_neuron_step_with(seed: u64, neuron: u32, step: u32, first: [u32; 4]) -> Self {
        let mut rng = Self::for_neuron_step(seed, neuron, step);
        rng.buf = first;
        rng.block = 1;
        rng.pos = rng.start;
        rng
    }

    /// Per-neuron stream used once when the pools are initialized.
    pub fn for_neuron_init(seed: u64, neuron: u32) -> Self {
        Self::new(seed, neuron, 0, Domain::NeuronInit, 0)
    }

    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        if self.pos == self.end {
            self.buf = philox4x32([self.ctr[0], self.ctr[1], self.ctr[2], self.block], self.key);
            self.block = self.block.wrapping_add(1);
            self.pos = self.start;
        }
        let v = self.buf[self.pos as usize];
        self.pos += 1;
        v
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let hi = self.next_u32() as u64;
        let lo = self.next_u32() as u64;
        (hi << 32) | lo
    }

    /// Uniform in [0, 1) with 53 bits of resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1), never exactly zero; safe to take the log of.
    #[inline]
    pub fn next_open_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli trial with success probability `p`.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Standard normal draw (Box-Muller, one value per two uniforms).
    pub fn next_normal(&mut self) -> f64 {
        let r = libm::sqrt(-2.0 * libm::log(self.next_open_f64()));
        r * libm::cos(2.0 * core::f64::consts::PI * self.next_f64())
    }

    /// Poisson-distributed count with mean `lambda` (multiplicative method,
    /// large means are split into chunks so `exp(-lambda)` stays representable).
    pub fn poisson(&mut self, lambda: f64) -> u32 {
        const CHUNK: f64 = 30.0;
        if !(lambda > 0.0) {
            return 0;
        }
        let mut remaining = lambda;
        let mut total = 0u32;
        while remaining > 0.0 {
            let l = if remaining > CHUNK { CHUNK } else { remaining };
            remaining -= l;
            total += self.poisson_limit(libm::exp(-l));
        }
        total
    }

    /// Poisson count for a precomputed `limit = exp(-lambda)`, with
    /// `lambda` at most about 30. Uses one 32-bit uniform per factor.
    #[inline]
    pub fn poisson_limit(&mut self, limit: f64) -> u32 {
        const SCALE: f64 = 1.0 / 4_294_967_296.0;
        let mut total = 0;
        let mut prod = (self.next_u32() as f64 + 0.5) * SCALE;
        while prod >= limit {
            total += 1;
            prod *= (self.next_u32() as f64 + 0.5) * SCALE;
        }
        total
    }
}

/// Poisson sampler by table inversion: one 32-bit draw per sample. Suited
/// to small means; the table stops once the remaining tail is below 2^-32.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonTable {
    /// `cdf[k]` is `P(X <= k)` scaled to 2^32.
    cdf: alloc::vec::Vec<u64>,
}

impl PoissonTable {
    pub fn new(lambda: f64) -> Self {
        const SCALE: f64 = 4_294_967_296.0;
        let mut cdf = alloc::vec::Vec::new();
        if lambda > 0.0 {
            let mut pk = libm::exp(-lambda);
            let mut sum = 0.0;
            let mut k = 0u32;
            while sum < 1.0 && (SCALE * (1.0 - sum) >= 1.0) && k < 1024 {
                sum += pk;
                cdf.push(libm::floor(sum.min(1.0) * SCALE) as u64);
                k += 1;
                pk *= lambda / k as f64;
            }
        }
        Self { cdf }
    }

    #[inline]
    pub fn sample(&self, rng: &mut KeyedRng) -> u32 {
        if self.cdf.is_empty() {
            return 0;
        }
        let x = rng.next_u32() as u64;
        self.cdf.iter().position(|&c| x < c).unwrap_or(self.cdf.len()) as u32
    }
}

/// Threshold such that a uniform `u32` draw `x` satisfies `x < threshold`
/// with probability `p` (up to 2^-32 resolution). `p = 1` always passes.
#[inline]
pub fn u32_threshold(p: f64) -> u64 {
    if p <= 0.0 {
        0
    } else if p >= 1.0 {
        1u64 << 32
    } else {
        libm::ceil(p * 4_294_967_296.0) as u64
    }
}

/// One keyed draw deciding whether edge `src -> dst` of `rule` exists.
/// Four consecutive targets share a Philox block.
#[inline]
pub fn edge_pair_word(seed: u64, rule: u32, src: u32, dst: u32) -> u32 {
    philox4x32([src, dst >> 2, tag(Domain::EdgePair, rule), 0], key_of(seed))[(dst & 3) as usize]
}

/// Stream of draws for geometric skipping along one (rule, source) row.
pub fn edge_row_stream(seed: u64, rule: u32, src: u32) -> KeyedRng {
    KeyedRng::new(seed, src, 0, Domain::EdgeRow, rule)
}
