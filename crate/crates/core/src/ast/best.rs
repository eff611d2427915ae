use serde::{Deserialize, Serialize};

/// An improvement of a solver's best total reward, stamped with the step
/// count at which the improving trajectory finished.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestPoint {
    pub steps: u64,
    pub reward: f64,
    pub collision: bool,
}

/// Last improvement recorded within `steps` calls, if any.
pub fn best_within(history: &[BestPoint], steps: u64) -> Option<BestPoint> {
    history.iter().take_while(|p| p.steps <= steps).last().copied()
}

/// Best colliding improvement recorded within `steps` calls, if any.
pub fn best_collision_within(history: &[BestPoint], steps: u64) -> Option<BestPoint> {
    history
        .iter()
        .take_while(|p| p.steps <= steps)
        .filter(|p| p.collision)
        .last()
        .copied()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookups_respect_the_cap() {
        let h = [
            BestPoint { steps: 10, reward: -1e4, collision: false },
            BestPoint { steps: 50, reward: -90.0, collision: true },
            BestPoint { steps: 90, reward: -40.0, collision: true },
        ];
        assert_eq!(best_within(&h, 5), None);
        assert_eq!(best_within(&h, 60).unwrap().reward, -90.0);
        assert_eq!(best_collision_within(&h, 40), None);
        assert_eq!(best_collision_within(&h, 100).unwrap().reward, -40.0);
    }
}
