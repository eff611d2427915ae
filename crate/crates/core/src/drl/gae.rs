use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaeParams {
    pub gamma: f64,
    pub lambda: f64,
    /// Rescale each batch's advantages to zero mean and unit variance.
    pub normalize: bool,
}

impl Default for GaeParams {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            lambda: 0.95,
            normalize: true,
        }
    }
}

impl GaeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidConfig("gae: gamma must lie in (0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidConfig("gae: lambda must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Discounted reward-to-go for one episode.
pub fn discounted_returns(rewards: &[f64], gamma: f64) -> Vec<f64> {
    let mut out = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for (o, r) in out.iter_mut().zip(rewards).rev() {
        acc = r + gamma * acc;
        *o = acc;
    }
    out
}

/// GAE advantages for one terminal episode. `values[t]` is the baseline at
/// the state before step `t`; the value after the last step is zero.
pub fn gae_advantages(rewards: &[f64], values: &[f64], params: &GaeParams) -> Vec<f64> {
    debug_assert_eq!(rewards.len(), values.len());
    let decay = params.gamma * params.lambda;
    let mut out = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    let mut next_value = 0.0;
    for t in (0..rewards.len()).rev() {
        let delta = rewards[t] + params.gamma * next_value - values[t];
        acc = delta + decay * acc;
        out[t] = acc;
        next_value = values[t];
    }
    out
}

/// Shifts and scales `xs` in place to zero mean and unit population variance.
/// A constant input becomes all zeros.
pub fn normalize(xs: &mut [f64]) {
    if xs.is_empty() {
        return;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    for x in xs.iter_mut() {
        *x -= mean;
        if std > 0.0 {
            *x /= std;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn returns_to_go() {
        let g = discounted_returns(&[1.0, 2.0, 3.0], 0.5);
        assert_eq!(g, vec![1.0 + 0.5 * (2.0 + 0.5 * 3.0), 2.0 + 1.5, 3.0]);
    }

    #[test]
    fn normalize_constant_is_zero() {
        let mut xs = [4.0; 5];
        normalize(&mut xs);
        assert_eq!(xs, [0.0; 5]);
    }
}
