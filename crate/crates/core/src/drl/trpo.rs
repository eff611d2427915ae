use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::conjugate_gradient;
use crate::nn::{rows_to_matrix, GaussianPolicy, ParamVector};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrpoParams {
    /// Mean-KL bound δ.
    pub kl_step: f64,
    pub cg_iters: usize,
    pub damping: f64,
    pub backtrack_ratio: f64,
    pub max_backtracks: usize,
    pub batch_size: usize,
}

impl Default for TrpoParams {
    fn default() -> Self {
        Self {
            kl_step: 0.1,
            cg_iters: 10,
            damping: 0.1,
            backtrack_ratio: 0.8,
            max_backtracks: 10,
            batch_size: 4000,
        }
    }
}

impl TrpoParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.kl_step > 0.0
            && self.cg_iters > 0
            && self.damping > 0.0
            && self.backtrack_ratio > 0.0
            && self.backtrack_ratio < 1.0
            && self.max_backtracks > 0
            && self.batch_size > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(
                "trpo: kl_step, cg_iters, damping, max_backtracks and batch_size must be positive; backtrack_ratio must lie in (0, 1)".into(),
            ))
        }
    }
}

/// Flattened state/action/advantage triples for one update.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleSet {
    pub states: Vec<Vec<f64>>,
    pub actions: Vec<Vec<f64>>,
    pub advantages: Vec<f64>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    fn matrices(&self, policy: &GaussianPolicy) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        if self.actions.len() != self.len() || self.advantages.len() != self.len() {
            return Err(Error::InvalidConfig("sample set columns differ in length".into()));
        }
        Ok((
            rows_to_matrix(&self.states, policy.state_dim())?,
            rows_to_matrix(&self.actions, policy.action_dim())?,
        ))
    }
}

fn mean_weighted_ratio(log_probs: &[f64], old_log_probs: &[f64], advantages: &[f64]) -> f64 {
    if log_probs.is_empty() {
        return 0.0;
    }
    let sum: f64 = log_probs
        .iter()
        .zip(old_log_probs)
        .zip(advantages)
        .map(|((l, o), a)| (l - o).exp() * a)
        .sum();
    sum / log_probs.len() as f64
}

/// `mean[π(a|s) / π_old(a|s) · A]`, with `old_log_probs` from `π_old`.
pub fn surrogate(policy: &GaussianPolicy, old_log_probs: &[f64], data: &SampleSet) -> Result<f64> {
    let (s, a) = data.matrices(policy)?;
    let means = policy.trace_batch(&s)?;
    let lp = policy.log_prob_rows(means.output(), &a);
    Ok(mean_weighted_ratio(&lp, old_log_probs, &data.advantages))
}

/// Gradient of [`surrogate`] with respect to the policy parameters.
pub fn surrogate_grad(policy: &GaussianPolicy, old_log_probs: &[f64], data: &SampleSet) -> Result<ParamVector> {
    let mut grad = ParamVector::zeros(policy.n_params());
    if data.is_empty() {
        return Ok(grad);
    }
    let (s, a) = data.matrices(policy)?;
    let trace = policy.trace_batch(&s)?;
    let lp = policy.log_prob_rows(trace.output(), &a);
    let n = data.len() as f64;
    let weights: Vec<f64> = lp
        .iter()
        .zip(old_log_probs)
        .zip(&data.advantages)
        .map(|((l, o), adv)| (l - o).exp() * adv / n)
        .collect();
    policy.accumulate_grad_log_prob_batch(&trace, &a, &weights, &mut grad);
    Ok(grad)
}

/// What one trust-region update did.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpdateStats {
    pub accepted: bool,
    /// Mean KL(old ‖ new) of the accepted step (zero if rejected).
    pub kl: f64,
    pub surrogate_before: f64,
    pub surrogate_after: f64,
    pub backtracks: usize,
    pub grad_norm: f64,
}

/// One TRPO step: natural-gradient direction by conjugate gradient on the
/// damped Fisher matrix, scaled to the KL boundary, then a backtracking line
/// search that accepts only a surrogate improvement within the KL bound.
/// The policy is left unchanged when no step is accepted.
pub fn trpo_update(policy: &mut GaussianPolicy, data: &SampleSet, params: &TrpoParams) -> Result<UpdateStats> {
    params.validate()?;
    let (s, a) = data.matrices(policy)?;
    let old = policy.clone();
    let old_trace = old.trace_batch(&s)?;
    let old_lp = old.log_prob_rows(old_trace.output(), &a);
    let before = mean_weighted_ratio(&old_lp, &old_lp, &data.advantages);

    let mut g = ParamVector::zeros(old.n_params());
    if !data.is_empty() {
        let n = data.len() as f64;
        let weights: Vec<f64> = data.advantages.iter().map(|adv| adv / n).collect();
        old.accumulate_grad_log_prob_batch(&old_trace, &a, &weights, &mut g);
    }
    if !g.is_finite() {
        return Err(Error::NonFinite("policy gradient"));
    }
    let grad_norm = g.norm();
    let mut stats = UpdateStats {
        accepted: false,
        kl: 0.0,
        surrogate_before: before,
        surrogate_after: before,
        backtracks: 0,
        grad_norm,
    };
    if grad_norm == 0.0 {
        return Ok(stats);
    }

    let fisher = old.fisher_operator(&s)?;
    let damped = |v: &ParamVector| -> ParamVector {
        let mut out = fisher.apply(v);
        out.axpy(params.damping, v);
        out
    };
    let dir = conjugate_gradient(|v| Ok(damped(v)), &g, params.cg_iters, 1e-10)?;
    let curvature = dir.dot(&damped(&dir));
    if !(curvature.is_finite() && curvature > 0.0) {
        return Err(Error::NonFinite("natural gradient step"));
    }
    let full_step = dir.scaled((2.0 * params.kl_step / curvature).sqrt());
    let theta_old = old.params();

    let mut frac = 1.0;
    for k in 0..params.max_backtracks {
        let mut theta = theta_old.clone();
        theta.axpy(frac, &full_step);
        policy.set_params(&theta)?;
        let new_trace = policy.trace_batch(&s)?;
        let lp = policy.log_prob_rows(new_trace.output(), &a);
        let after = mean_weighted_ratio(&lp, &old_lp, &data.advantages);
        let kl = old.mean_kl_rows(old_trace.output(), policy, new_trace.output());
        if after.is_finite() && kl.is_finite() && after > before && kl <= params.kl_step {
            stats.accepted = true;
            stats.kl = kl;
            stats.surrogate_after = after;
            stats.backtracks = k;
            return Ok(stats);
        }
        frac *= params.backtrack_ratio;
    }
    policy.set_params(&theta_old)?;
    stats.backtracks = params.max_backtracks;
    Ok(stats)
}
