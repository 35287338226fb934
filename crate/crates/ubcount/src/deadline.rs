//! Wall-clock deadlines for the core's polling `Deadline` trait.

use std::time::{Duration, Instant};

use ubcount_core::Deadline;

/// Expires at a fixed instant; `None` never expires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WallDeadline {
    end: Option<Instant>,
}

impl WallDeadline {
    pub fn after(budget: Duration) -> WallDeadline {
        WallDeadline {
            end: Instant::now().checked_add(budget),
        }
    }

    /// From seconds; non-finite values mean no limit.
    pub fn after_secs(secs: f64) -> WallDeadline {
        if secs.is_finite() && secs >= 0.0 {
            WallDeadline::after(Duration::from_secs_f64(secs))
        } else {
            WallDeadline::unlimited()
        }
    }

    pub fn unlimited() -> WallDeadline {
        WallDeadline { end: None }
    }
}

impl Deadline for WallDeadline {
    fn expired(&self) -> bool {
        self.end.is_some_and(|end| Instant::now() >= end)
    }
}
