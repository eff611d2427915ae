//! The black-box simulator contract and the machinery shared by all solvers:
//! the reward function, step-call metering, rollouts, and deterministic replay.
//!
//! Every disturbance vector passed to [`Simulator::step`] fixes all of the
//! simulator's randomness, so a state is fully identified by the sequence of
//! actions that led to it. Replaying that sequence from [`Simulator::initialize`]
//! reproduces the state bit for bit.

mod action;
mod best;
mod meter;
mod reward;
mod rollout;

pub use action::EnvAction;
pub use best::{best_collision_within, best_within, BestPoint};
pub use meter::StepMeter;
pub use reward::{reward, RewardParams};
pub use rollout::{
    replay, reward_without_noise, rollout, ActionSource, Outcome, Replay, Trajectory,
    ZeroActions,
};

use serde::{Deserialize, Serialize};

use crate::Result;

/// What a single simulator step reports back to the solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionOutcome {
    /// Mahalanobis distance of the applied action from the expected action.
    pub mahalanobis: f64,
    /// The new state is in the event set (a collision).
    pub event: bool,
    /// Distance between the vehicle and the nearest pedestrian, in metres.
    pub dist: f64,
    /// The episode is over: an event occurred or the horizon was reached.
    pub terminal: bool,
}

/// A generative simulator driven entirely by environment actions.
///
/// After [`initialize`](Simulator::initialize), the behavior of the simulator
/// must be a pure function of the actions subsequently passed to
/// [`step`](Simulator::step).
pub trait Simulator {
    /// Resets the simulator to its initial state.
    fn initialize(&mut self);

    /// Advances one time step under `action`.
    ///
    /// Returns [`Error::StepAfterTerminal`](crate::Error::StepAfterTerminal)
    /// when called on a terminal state.
    fn step(&mut self, action: &EnvAction) -> Result<TransitionOutcome>;

    /// True once an event occurred or the horizon was reached.
    fn is_terminal(&self) -> bool;

    /// State vector visible to solvers that use one.
    fn observe(&self) -> Vec<f64>;

    fn action_dim(&self) -> usize;

    fn observation_dim(&self) -> usize;

    /// Maximum number of steps in an episode.
    fn horizon(&self) -> usize;

    /// Mahalanobis distance of `action` with every sensor-noise component
    /// set to zero.
    fn noise_free_mahalanobis(&self, action: &EnvAction) -> f64;
}

impl<S: Simulator + ?Sized> Simulator for Box<S> {
    fn initialize(&mut self) {
        (**self).initialize()
    }
    fn step(&mut self, action: &EnvAction) -> Result<TransitionOutcome> {
        (**self).step(action)
    }
    fn is_terminal(&self) -> bool {
        (**self).is_terminal()
    }
    fn observe(&self) -> Vec<f64> {
        (**self).observe()
    }
    fn action_dim(&self) -> usize {
        (**self).action_dim()
    }
    fn observation_dim(&self) -> usize {
        (**self).observation_dim()
    }
    fn horizon(&self) -> usize {
        (**self).horizon()
    }
    fn noise_free_mahalanobis(&self, action: &EnvAction) -> f64 {
        (**self).noise_free_mahalanobis(action)
    }
}
