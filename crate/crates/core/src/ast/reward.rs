use serde::{Deserialize, Serialize};

use super::TransitionOutcome;
use crate::{Error, Result};

/// Parameters of the stress-testing reward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardParams {
    /// Penalty for reaching the horizon without a collision.
    pub miss_penalty: f64,
    /// Per-metre scaling of the vehicle–pedestrian distance on a miss.
    pub dist_scale: f64,
    /// Horizon in steps.
    pub horizon: usize,
}

impl Default for RewardParams {
    fn default() -> Self {
        Self {
            miss_penalty: -10_000.0,
            dist_scale: -1_000.0,
            horizon: 100,
        }
    }
}

impl RewardParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.miss_penalty < 0.0) {
            return Err(Error::InvalidConfig("miss_penalty must be negative".into()));
        }
        if !(self.dist_scale < 0.0) {
            return Err(Error::InvalidConfig("dist_scale must be negative".into()));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be at least 1".into()));
        }
        Ok(())
    }
}

/// Reward for the step with index `t` (zero-based) that produced `outcome`.
///
/// * collision: `0`
/// * horizon reached without collision: `miss_penalty + dist_scale * dist`
/// * otherwise: `-ln(1 + mahalanobis)`
///
/// The terminal branch replaces the likelihood term on the step that ends the
/// episode.
pub fn reward(outcome: &TransitionOutcome, params: &RewardParams, t: usize) -> f64 {
    if outcome.event {
        0.0
    } else if outcome.terminal || t + 1 >= params.horizon {
        params.miss_penalty + params.dist_scale * outcome.dist
    } else {
        -outcome.mahalanobis.ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(mahalanobis: f64, event: bool, dist: f64, terminal: bool) -> TransitionOutcome {
        TransitionOutcome {
            mahalanobis,
            event,
            dist,
            terminal,
        }
    }

    #[test]
    fn collision_is_zero() {
        let p = RewardParams::default();
        assert_eq!(reward(&outcome(3.0, true, 0.1, true), &p, 17), 0.0);
    }

    #[test]
    fn miss_penalty_with_distance() {
        let p = RewardParams::default();
        assert_eq!(reward(&outcome(3.0, false, 5.0, true), &p, 99), -15_000.0);
    }

    #[test]
    fn likelihood_branch() {
        let p = RewardParams::default();
        assert_eq!(reward(&outcome(0.0, false, 5.0, false), &p, 0), 0.0);
        let r = reward(&outcome(1.0, false, 5.0, false), &p, 0);
        assert!((r - (-0.693_147_180_559_945_3)).abs() < 1e-15);
    }

    #[test]
    fn last_step_uses_miss_branch_even_if_not_flagged_terminal() {
        let p = RewardParams {
            horizon: 10,
            ..Default::default()
        };
        assert_eq!(reward(&outcome(1.0, false, 2.0, false), &p, 9), -12_000.0);
    }

    #[test]
    fn validation() {
        assert!(RewardParams::default().validate().is_ok());
        let bad = RewardParams {
            miss_penalty: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = RewardParams {
            horizon: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
