use std::time::{Duration, Instant};

use qbvsched_core::engine::Budget;

/// Wall-clock search budget measured from construction.
pub struct WallClock {
    until: Instant,
}

impl WallClock {
    pub fn new(limit: Duration) -> Self {
        WallClock {
            until: Instant::now() + limit,
        }
    }
}

impl Budget for WallClock {
    fn exhausted(&self) -> bool {
        Instant::now() >= self.until
    }
}
