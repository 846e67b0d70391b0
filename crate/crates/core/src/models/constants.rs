//! Frozen constants of the benchmark models, in SI units. Every model and
//! every test reads its numbers from here. `docs/model-constants.md` mirrors
//! this file; bump [`VERSION`] whenever a value changes.

pub const VERSION: u32 = 1;

/// Default integration step (s).
pub const DT: f64 = 1e-4;

/// Current-based balanced network with delta synapses.
pub mod brunel {
    pub const N_EXC: u32 = 10_000;
    pub const N_INH: u32 = 2_500;
    pub const P: f64 = 0.1;
    pub const TAU_M: f64 = 0.020;
    pub const V_REST: f64 = 0.0;
    pub const V_RESET: f64 = 0.010;
    pub const V_THRESH: f64 = 0.020;
    pub const T_REF: f64 = 0.002;
    /// Excitatory PSP amplitude (V).
    pub const J: f64 = 0.1e-3;
    /// Relative strength of inhibition.
    pub const G: f64 = 5.0;
    pub const DELAY: f64 = 0.0015;
    /// External inputs per neuron, equal to the base excitatory in-degree.
    pub const C_EXT: f64 = 1000.0;
    /// External rate as a multiple of the rate that would bring the mean
    /// free membrane potential to threshold, `V_THRESH / (J * C_EXT * TAU_M)`.
    pub const ETA: f64 = 2.0;
}

/// Conductance-based network with exponential synaptic conductances.
/// Conductances are expressed in units of the leak conductance.
pub mod vogels {
    pub const N_EXC: u32 = 3_200;
    pub const N_INH: u32 = 800;
    pub const P: f64 = 0.02;
    pub const TAU_M: f64 = 0.020;
    pub const E_LEAK: f64 = -0.060;
    pub const V_RESET: f64 = -0.060;
    pub const V_THRESH: f64 = -0.050;
    pub const T_REF: f64 = 0.005;
    pub const E_EXC: f64 = 0.0;
    pub const E_INH: f64 = -0.080;
    pub const TAU_EXC: f64 = 0.005;
    pub const TAU_INH: f64 = 0.010;
    pub const W_EXC: f64 = 0.6;
    pub const W_INH: f64 = 6.7;
    pub const DELAY: f64 = 0.0008;
    /// Initial conductances are drawn from normals with these means and
    /// standard deviations, clamped at zero.
    pub const G_EXC_INIT: (f64, f64) = (4.0, 1.5);
    pub const G_INH_INIT: (f64, f64) = (20.0, 12.0);
    /// Weak Poisson background (Hz per neuron) and its conductance jump.
    /// Without it the network falls silent after the initial transient.
    pub const EXT_RATE: f64 = 5.0;
    pub const W_EXT: f64 = 0.6;
}

/// Pair-based plasticity on excitatory-to-excitatory synapses of the
/// current-based network. Amplitudes and bounds are multiples of `brunel::J`.
pub mod stdp {
    pub const A_PLUS: f64 = 0.01;
    pub const A_MINUS: f64 = 0.0105;
    pub const TAU_PLUS: f64 = 0.020;
    pub const TAU_MINUS: f64 = 0.020;
    pub const W_MIN: f64 = 0.0;
    pub const W_MAX: f64 = 2.0;
}

/// Synthetic memory-traffic workload.
pub mod synth {
    pub const DENSITY: f64 = 0.00156;
    pub const ACTIVITY: f64 = 0.005;
    pub const DELAY_STEPS: u32 = 1;
}
