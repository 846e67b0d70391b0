use crate::error::{CoreError, CoreResult};

/// Pair-based STDP amplitudes, time constants (s) and weight bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StdpParams {
    pub a_plus: f64,
    pub a_minus: f64,
    pub tau_plus: f64,
    pub tau_minus: f64,
    pub w_min: f64,
    pub w_max: f64,
}

impl StdpParams {
    pub fn validate(&self) -> CoreResult<()> {
        if !(self.tau_plus > 0.0 && self.tau_minus > 0.0) {
            return Err(CoreError::InvalidParams("STDP time constants must be positive"));
        }
        if !(self.w_min <= self.w_max) || self.a_plus < 0.0 || self.a_minus < 0.0 {
            return Err(CoreError::InvalidParams("invalid STDP amplitudes or bounds"));
        }
        Ok(())
    }

    /// Post fired `delta` seconds after pre.
    #[inline]
    pub fn potentiate(&self, w: f32, delta: f32) -> f32 {
        let dw = self.a_plus * libm::exp(-(delta as f64) / self.tau_plus);
        self.clamp(w + dw as f32)
    }

    /// Pre arrived `delta` seconds after post.
    #[inline]
    pub fn depress(&self, w: f32, delta: f32) -> f32 {
        let dw = self.a_minus * libm::exp(-(delta as f64) / self.tau_minus);
        self.clamp(w - dw as f32)
    }

    #[inline]
    fn clamp(&self, w: f32) -> f32 {
        w.max(self.w_min as f32).min(self.w_max as f32)
    }
}
