/// A batch of `delay` steps cut into two halves. No spike fired inside a
/// batch is due before the next batch starts, so spikes fired in one half can
/// be exchanged while the other half runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchSchedule {
    delay: u32,
}

impl BatchSchedule {
    pub fn new(delay: u32) -> Self {
        assert!(delay >= 1, "delay must be at least one step");
        Self { delay }
    }

    pub fn delay(&self) -> u32 {
        self.delay
    }

    /// `⌊d/2⌋` steps.
    pub fn first_half(&self) -> u32 {
        self.delay / 2
    }

    /// `⌈d/2⌉` steps.
    pub fn second_half(&self) -> u32 {
        self.delay - self.delay / 2
    }

    /// Step range `[start, end)` of half `h` (0 or 1) of batch `batch`.
    pub fn half_range(&self, batch: u32, h: u32) -> (u32, u32) {
        let start = batch * self.delay + if h == 0 { 0 } else { self.first_half() };
        let len = if h == 0 { self.first_half() } else { self.second_half() };
        (start, start + len)
    }

    /// Number of batches needed to cover `steps` steps.
    pub fn batches(&self, steps: u32) -> u32 {
        steps.div_ceil(self.delay)
    }
}
