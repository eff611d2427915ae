use serde::{Deserialize, Serialize};

use super::TransitionOutcome;

/// Counts calls to the simulator's step function.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepMeter {
    count: u64,
    count_at_first_collision: Option<u64>,
}

impl StepMeter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one step call and its outcome.
    pub fn record(&mut self, outcome: &TransitionOutcome) {
        self.count += 1;
        if outcome.event && self.count_at_first_collision.is_none() {
            self.count_at_first_collision = Some(self.count);
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Step count (inclusive) at which the first collision was observed.
    pub fn count_at_first_collision(&self) -> Option<u64> {
        self.count_at_first_collision
    }

    /// Combines two meters that ran independently.
    ///
    /// Counts add. The first-collision mark is only meaningful for a single
    /// ordered stream of calls, so the merged mark is the smaller of the two
    /// (a lower bound on when a collision would have been found had the
    /// streams been interleaved), which keeps the merge commutative.
    pub fn merge(&self, other: &StepMeter) -> StepMeter {
        let first = match (self.count_at_first_collision, other.count_at_first_collision) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        StepMeter {
            count: self.count + other.count,
            count_at_first_collision: first,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(event: bool) -> TransitionOutcome {
        TransitionOutcome {
            mahalanobis: 0.0,
            event,
            dist: 1.0,
            terminal: event,
        }
    }

    #[test]
    fn first_collision_is_sticky() {
        let mut m = StepMeter::new();
        m.record(&outcome(false));
        m.record(&outcome(true));
        m.record(&outcome(false));
        m.record(&outcome(true));
        assert_eq!(m.count(), 4);
        assert_eq!(m.count_at_first_collision(), Some(2));
    }

    #[test]
    fn merge_is_commutative() {
        let mut a = StepMeter::new();
        let mut b = StepMeter::new();
        for i in 0..7 {
            a.record(&outcome(i == 5));
        }
        for i in 0..3 {
            b.record(&outcome(i == 1));
        }
        assert_eq!(a.merge(&b), b.merge(&a));
        assert_eq!(a.merge(&b).count(), 10);
        assert_eq!(a.merge(&StepMeter::new()), a);
    }
}
