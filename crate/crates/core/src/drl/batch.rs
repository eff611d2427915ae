use rand::Rng;

use crate::ast::{rollout, EnvAction, RewardParams, Simulator, StepMeter, Trajectory};
use crate::nn::GaussianPolicy;
use crate::{Error, Result};

/// One sampled episode together with the policy inputs that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub trajectory: Trajectory,
    /// Observations scaled as fed to the policy, one per step.
    pub inputs: Vec<Vec<f64>>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.trajectory.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectory.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Batch {
    pub paths: Vec<Path>,
    pub timesteps: usize,
}

/// Rolls out `policy` from fresh initial states until at least `batch_size`
/// steps have been collected. Every trajectory runs to a terminal state.
pub fn collect_batch<S, R>(
    sim: &mut S,
    policy: &GaussianPolicy,
    batch_size: usize,
    obs_scale: f64,
    reward_params: &RewardParams,
    rng: &mut R,
    meter: &mut StepMeter,
) -> Result<Batch>
where
    S: Simulator + ?Sized,
    R: Rng + ?Sized,
{
    if policy.state_dim() != sim.observation_dim() || policy.action_dim() != sim.action_dim() {
        return Err(Error::InvalidConfig(format!(
            "policy maps {} → {} but the simulator needs {} → {}",
            policy.state_dim(),
            policy.action_dim(),
            sim.observation_dim(),
            sim.action_dim()
        )));
    }
    let mut batch = Batch::default();
    while batch.timesteps < batch_size {
        let mut inputs = Vec::with_capacity(sim.horizon());
        let mut failure = None;
        let mut source = |_t: usize, obs: &[f64]| {
            let input: Vec<f64> = obs.iter().map(|o| o * obs_scale).collect();
            let action = policy
                .sample(&input, rng)
                .and_then(EnvAction::new)
                .unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    EnvAction::zeros(policy.action_dim())
                });
            inputs.push(input);
            action
        };
        let trajectory = rollout(sim, &mut source, reward_params, meter)?;
        if let Some(e) = failure {
            return Err(e);
        }
        batch.timesteps += trajectory.len();
        batch.paths.push(Path { trajectory, inputs });
    }
    Ok(batch)
}
