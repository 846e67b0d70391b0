use crate::error::{CoreError, CoreResult};

/// Leaky integrate-and-fire membrane parameters (SI units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifParams {
    pub tau_m: f64,
    pub v_rest: f64,
    pub v_reset: f64,
    pub v_thresh: f64,
    pub t_ref: f64,
}

impl LifParams {
    /// Both rest and reset must lie below threshold. Reset is allowed above
    /// rest, as in the current-based network.
    pub fn validate(&self) -> CoreResult<()> {
        if !(self.tau_m > 0.0) || self.t_ref < 0.0 {
            return Err(CoreError::InvalidParams("time constants must be positive"));
        }
        if !(self.v_rest < self.v_thresh && self.v_reset < self.v_thresh) {
            return Err(CoreError::InvalidParams("rest and reset must lie below threshold"));
        }
        Ok(())
    }

    /// Refractory period in whole steps.
    #[inline]
    pub fn refractory_steps(&self, dt: f32) -> u32 {
        libm::round(self.t_ref / dt as f64) as u32
    }
}
