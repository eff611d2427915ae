use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{collect_batch, discounted_returns, gae_advantages, normalize, trpo_update};
use super::{GaeParams, LinearBaseline, SampleSet, TrpoParams, UpdateStats};
use crate::ast::{BestPoint, RewardParams, Simulator, StepMeter, Trajectory};
use crate::nn::GaussianPolicy;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DrlParams {
    pub hidden: Vec<usize>,
    /// Multiplier applied to observations before they reach the policy and
    /// the baseline.
    pub obs_scale: f64,
    pub gae: GaeParams,
    pub trpo: TrpoParams,
    pub baseline_reg: f64,
    /// Upper bound on training iterations.
    pub iterations: usize,
    /// Stop once this many simulator steps have been spent.
    pub max_steps: Option<u64>,
    pub seed: u64,
}

impl Default for DrlParams {
    fn default() -> Self {
        Self {
            hidden: vec![32, 32],
            obs_scale: 0.1,
            gae: GaeParams::default(),
            trpo: TrpoParams::default(),
            baseline_reg: 1e-5,
            iterations: 1000,
            max_steps: None,
            seed: 0,
        }
    }
}

impl DrlParams {
    pub fn validate(&self) -> Result<()> {
        self.gae.validate()?;
        self.trpo.validate()?;
        if self.hidden.contains(&0) {
            return Err(Error::InvalidConfig("drl: hidden layers must be non-empty".into()));
        }
        if !(self.obs_scale.is_finite() && self.obs_scale > 0.0) {
            return Err(Error::InvalidConfig("drl: obs_scale must be positive".into()));
        }
        if !(self.baseline_reg.is_finite() && self.baseline_reg > 0.0) {
            return Err(Error::InvalidConfig("drl: baseline_reg must be positive".into()));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("drl: iterations must be positive".into()));
        }
        Ok(())
    }
}

/// One row of the learning curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub iteration: usize,
    pub mean_return: f64,
    pub best_collision_reward: Option<f64>,
    pub cumulative_step_calls: u64,
    pub update: UpdateStats,
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    /// Highest-reward colliding trajectory sampled during training.
    pub best: Option<Trajectory>,
    /// One entry per improvement of the best collision reward.
    pub history: Vec<BestPoint>,
    pub curve: Vec<CurvePoint>,
    pub policy: GaussianPolicy,
}

/// Trains a fresh policy against `sim` until the iteration limit or the step
/// budget is reached.
pub fn train<S>(sim: &mut S, reward_params: &RewardParams, params: &DrlParams, meter: &mut StepMeter) -> Result<TrainResult>
where
    S: Simulator + ?Sized,
{
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut policy = GaussianPolicy::init(sim.observation_dim(), &params.hidden, sim.action_dim(), &mut rng);
    let mut baseline = LinearBaseline::new(params.baseline_reg, sim.horizon());
    let mut best: Option<Trajectory> = None;
    let mut history = Vec::new();
    let mut curve = Vec::new();

    for iteration in 0..params.iterations {
        if params.max_steps.is_some_and(|cap| meter.count() >= cap) {
            break;
        }
        let before = meter.count();
        let batch = collect_batch(
            sim,
            &policy,
            params.trpo.batch_size,
            params.obs_scale,
            reward_params,
            &mut rng,
            meter,
        )?;

        let mut steps = before;
        let mut return_sum = 0.0;
        let mut data = SampleSet::default();
        let mut returns = Vec::with_capacity(batch.paths.len());
        for path in &batch.paths {
            let traj = &path.trajectory;
            steps += traj.len() as u64;
            return_sum += traj.total_reward;
            if traj.is_collision() && best.as_ref().is_none_or(|b| traj.total_reward > b.total_reward) {
                best = Some(traj.clone());
                history.push(BestPoint {
                    steps,
                    reward: traj.total_reward,
                    collision: true,
                });
            }
            let values = baseline.predict_path(&path.inputs);
            data.advantages
                .extend(gae_advantages(&traj.rewards, &values, &params.gae));
            data.states.extend(path.inputs.iter().cloned());
            data.actions
                .extend(traj.actions.iter().map(|a| a.as_slice().to_vec()));
            returns.push(discounted_returns(&traj.rewards, params.gae.gamma));
        }
        if params.gae.normalize {
            normalize(&mut data.advantages);
        }
        let fit_data: Vec<(&[Vec<f64>], &[f64])> = batch
            .paths
            .iter()
            .zip(&returns)
            .map(|(p, r)| (p.inputs.as_slice(), r.as_slice()))
            .collect();
        baseline.fit(&fit_data)?;

        let update = trpo_update(&mut policy, &data, &params.trpo)?;
        curve.push(CurvePoint {
            iteration,
            mean_return: return_sum / batch.paths.len() as f64,
            best_collision_reward: best.as_ref().map(|b| b.total_reward),
            cumulative_step_calls: meter.count(),
            update,
        });
    }

    Ok(TrainResult {
        best,
        history,
        curve,
        policy,
    })
}
