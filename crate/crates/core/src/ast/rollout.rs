use serde::{Deserialize, Serialize};

use super::{reward, EnvAction, RewardParams, Simulator, StepMeter, TransitionOutcome};
use crate::{Error, Result};

/// How an episode ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Collision,
    HorizonMiss,
}

/// One complete episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub actions: Vec<EnvAction>,
    pub rewards: Vec<f64>,
    /// Observation seen before each action.
    pub states: Vec<Vec<f64>>,
    pub transitions: Vec<TransitionOutcome>,
    pub outcome: Outcome,
    pub total_reward: f64,
}

impl Trajectory {
    fn from_parts(
        actions: Vec<EnvAction>,
        rewards: Vec<f64>,
        states: Vec<Vec<f64>>,
        transitions: Vec<TransitionOutcome>,
    ) -> Self {
        let outcome = match transitions.last() {
            Some(t) if t.event => Outcome::Collision,
            _ => Outcome::HorizonMiss,
        };
        let total_reward = rewards.iter().sum();
        Self {
            actions,
            rewards,
            states,
            transitions,
            outcome,
            total_reward,
        }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn is_collision(&self) -> bool {
        self.outcome == Outcome::Collision
    }
}

/// Supplies the action for each step of a rollout.
pub trait ActionSource {
    fn next_action(&mut self, t: usize, observation: &[f64]) -> EnvAction;
}

impl<F> ActionSource for F
where
    F: FnMut(usize, &[f64]) -> EnvAction,
{
    fn next_action(&mut self, t: usize, observation: &[f64]) -> EnvAction {
        self(t, observation)
    }
}

/// Always returns the expected (all-zero) action.
#[derive(Debug, Clone, Copy)]
pub struct ZeroActions(pub usize);

impl ActionSource for ZeroActions {
    fn next_action(&mut self, _t: usize, _observation: &[f64]) -> EnvAction {
        EnvAction::zeros(self.0)
    }
}

/// Resets `sim` and drives it to a terminal state with actions from `source`.
pub fn rollout<S, A>(
    sim: &mut S,
    source: &mut A,
    params: &RewardParams,
    meter: &mut StepMeter,
) -> Result<Trajectory>
where
    S: Simulator + ?Sized,
    A: ActionSource + ?Sized,
{
    sim.initialize();
    let dim = sim.action_dim();
    let cap = sim.horizon();
    let mut actions = Vec::with_capacity(cap);
    let mut rewards = Vec::with_capacity(cap);
    let mut states = Vec::with_capacity(cap);
    let mut transitions = Vec::with_capacity(cap);

    while !sim.is_terminal() {
        let t = actions.len();
        let obs = sim.observe();
        let action = source.next_action(t, &obs);
        action.check_dim(dim)?;
        let out = sim.step(&action)?;
        meter.record(&out);
        rewards.push(reward(&out, params, t));
        states.push(obs);
        actions.push(action);
        transitions.push(out);
    }
    Ok(Trajectory::from_parts(actions, rewards, states, transitions))
}

/// Result of replaying an action sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub trajectory: Trajectory,
    /// Actions left over after the simulator became terminal.
    pub unconsumed: usize,
}

/// Re-simulates `actions` from the initial state.
///
/// Stops at the first terminal state; any remaining actions are reported in
/// [`Replay::unconsumed`]. Fails with [`Error::NotTerminal`] if the actions
/// run out first. Replays are not metered.
pub fn replay<S>(sim: &mut S, actions: &[EnvAction], params: &RewardParams) -> Result<Replay>
where
    S: Simulator + ?Sized,
{
    if actions.is_empty() {
        return Err(Error::EmptyActions);
    }
    let mut it = actions.iter().cloned();
    let mut source = |_t: usize, _obs: &[f64]| it.next();
    let traj = replay_with(sim, &mut source, params)?;
    let unconsumed = actions.len() - traj.len();
    Ok(Replay {
        trajectory: traj,
        unconsumed,
    })
}

fn replay_with<S, F>(sim: &mut S, next: &mut F, params: &RewardParams) -> Result<Trajectory>
where
    S: Simulator + ?Sized,
    F: FnMut(usize, &[f64]) -> Option<EnvAction>,
{
    sim.initialize();
    let dim = sim.action_dim();
    let mut actions = Vec::new();
    let mut rewards = Vec::new();
    let mut states = Vec::new();
    let mut transitions = Vec::new();
    while !sim.is_terminal() {
        let t = actions.len();
        let obs = sim.observe();
        let Some(action) = next(t, &obs) else {
            return Err(Error::NotTerminal { consumed: t });
        };
        action.check_dim(dim)?;
        let out = sim.step(&action)?;
        rewards.push(reward(&out, params, t));
        states.push(obs);
        actions.push(action);
        transitions.push(out);
    }
    Ok(Trajectory::from_parts(actions, rewards, states, transitions))
}

/// Total reward of `actions` with the sensor-noise components zeroed in the
/// likelihood term only. The dynamics are replayed unchanged, so the
/// event/terminal structure of the episode is identical to the original.
pub fn reward_without_noise<S>(sim: &mut S, actions: &[EnvAction], params: &RewardParams) -> Result<f64>
where
    S: Simulator + ?Sized,
{
    let traj = replay(sim, actions, params)?.trajectory;
    let total = traj
        .transitions
        .iter()
        .zip(&traj.actions)
        .enumerate()
        .map(|(t, (out, action))| {
            let quiet = TransitionOutcome {
                mahalanobis: sim.noise_free_mahalanobis(action),
                ..*out
            };
            reward(&quiet, params, t)
        })
        .sum();
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A 1-D walker that "collides" when its position reaches `goal`.
    struct Walker {
        pos: f64,
        steps: usize,
        horizon: usize,
        goal: f64,
        done: bool,
    }

    impl Walker {
        fn new(horizon: usize, goal: f64) -> Self {
            Self {
                pos: 0.0,
                steps: 0,
                horizon,
                goal,
                done: false,
            }
        }
    }

    impl Simulator for Walker {
        fn initialize(&mut self) {
            self.pos = 0.0;
            self.steps = 0;
            self.done = false;
        }
        fn step(&mut self, action: &EnvAction) -> Result<TransitionOutcome> {
            if self.done {
                return Err(Error::StepAfterTerminal { steps: self.steps });
            }
            let a = action.as_slice();
            self.pos += a[0];
            self.steps += 1;
            let event = self.pos >= self.goal;
            self.done = event || self.steps >= self.horizon;
            Ok(TransitionOutcome {
                mahalanobis: (a[0] * a[0] + a[1] * a[1]).sqrt(),
                event,
                dist: (self.goal - self.pos).abs(),
                terminal: self.done,
            })
        }
        fn is_terminal(&self) -> bool {
            self.done
        }
        fn observe(&self) -> Vec<f64> {
            vec![self.pos]
        }
        fn action_dim(&self) -> usize {
            2
        }
        fn observation_dim(&self) -> usize {
            1
        }
        fn horizon(&self) -> usize {
            self.horizon
        }
        fn noise_free_mahalanobis(&self, action: &EnvAction) -> f64 {
            action.as_slice()[0].abs()
        }
    }

    fn params(horizon: usize) -> RewardParams {
        RewardParams {
            horizon,
            ..Default::default()
        }
    }

    #[test]
    fn zero_actions_reach_horizon() {
        let mut sim = Walker::new(5, 1.0);
        let mut meter = StepMeter::new();
        let traj = rollout(&mut sim, &mut ZeroActions(2), &params(5), &mut meter).unwrap();
        assert_eq!(traj.len(), 5);
        assert_eq!(traj.outcome, Outcome::HorizonMiss);
        assert_eq!(traj.rewards[4], -10_000.0 - 1_000.0);
        assert_eq!(meter.count(), 5);
        assert_eq!(meter.count_at_first_collision(), None);
    }

    #[test]
    fn collision_marks_meter() {
        let mut sim = Walker::new(10, 1.0);
        let mut meter = StepMeter::new();
        let mut src = |_t: usize, _o: &[f64]| EnvAction::new(vec![0.5, 0.0]).unwrap();
        let traj = rollout(&mut sim, &mut src, &params(10), &mut meter).unwrap();
        assert_eq!(traj.len(), 2);
        assert!(traj.is_collision());
        assert_eq!(*traj.rewards.last().unwrap(), 0.0);
        assert_eq!(meter.count_at_first_collision(), Some(2));
    }

    #[test]
    fn wrong_dimension_is_an_error() {
        let mut sim = Walker::new(10, 1.0);
        let mut meter = StepMeter::new();
        let err = rollout(&mut sim, &mut ZeroActions(3), &params(10), &mut meter).unwrap_err();
        assert!(matches!(err, Error::ActionDimension { expected: 2, actual: 3 }));
    }

    #[test]
    fn replay_reports_unconsumed_and_exhaustion() {
        let mut sim = Walker::new(10, 1.0);
        let push = EnvAction::new(vec![0.6, 0.1]).unwrap();
        let actions = vec![push.clone(); 5];
        let r = replay(&mut sim, &actions, &params(10)).unwrap();
        assert_eq!(r.trajectory.len(), 2);
        assert_eq!(r.unconsumed, 3);

        let short = vec![EnvAction::zeros(2); 3];
        assert!(matches!(
            replay(&mut sim, &short, &params(10)),
            Err(Error::NotTerminal { consumed: 3 })
        ));
        assert!(matches!(replay(&mut sim, &[], &params(10)), Err(Error::EmptyActions)));
    }

    #[test]
    fn replay_matches_rollout() {
        let mut sim = Walker::new(10, 1.0);
        let mut meter = StepMeter::new();
        let mut k = 0.0;
        let mut src = |_t: usize, _o: &[f64]| {
            k += 0.03;
            EnvAction::new(vec![k, -k]).unwrap()
        };
        let traj = rollout(&mut sim, &mut src, &params(10), &mut meter).unwrap();
        let again = replay(&mut sim, &traj.actions, &params(10)).unwrap();
        assert_eq!(again.trajectory, traj);
        assert_eq!(again.unconsumed, 0);
    }

    #[test]
    fn noise_free_reward_is_not_worse() {
        let mut sim = Walker::new(10, 1.0);
        let actions = vec![EnvAction::new(vec![0.4, 0.3]).unwrap(); 3];
        let original = replay(&mut sim, &actions, &params(10)).unwrap().trajectory;
        let quiet = reward_without_noise(&mut sim, &actions, &params(10)).unwrap();
        assert!(original.is_collision());
        assert!(quiet > original.total_reward);

        let clean = vec![EnvAction::new(vec![0.4, 0.0]).unwrap(); 3];
        let original = replay(&mut sim, &clean, &params(10)).unwrap().trajectory;
        let quiet = reward_without_noise(&mut sim, &clean, &params(10)).unwrap();
        assert_eq!(quiet, original.total_reward);
    }
}
