use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{BatchTrace, Mlp, ParamVector};
use crate::{Error, Result};

/// A diagonal Gaussian, parameterized by mean and log standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagGaussian {
    pub mean: Vec<f64>,
    pub log_std: Vec<f64>,
}

impl DiagGaussian {
    pub fn log_prob(&self, x: &[f64]) -> f64 {
        let half_ln_2pi = 0.5 * (2.0 * PI).ln();
        self.mean
            .iter()
            .zip(&self.log_std)
            .zip(x)
            .map(|((m, ls), xi)| {
                let z = (xi - m) * (-ls).exp();
                -0.5 * z * z - ls - half_ln_2pi
            })
            .sum()
    }
}

/// KL(old ‖ new) between diagonal Gaussians, in closed form.
pub fn kl_diag_gaussian(old: &DiagGaussian, new: &DiagGaussian) -> f64 {
    old.mean
        .iter()
        .zip(&old.log_std)
        .zip(new.mean.iter().zip(&new.log_std))
        .map(|((mo, lo), (mn, ln))| {
            let var_ratio = (2.0 * (lo - ln)).exp();
            let d = (mo - mn) * (-ln).exp();
            ln - lo + 0.5 * (var_ratio + d * d) - 0.5
        })
        .sum()
}

/// Gaussian policy with a state-dependent mean and a state-independent
/// diagonal covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPolicy {
    pub mean: Mlp,
    pub log_std: Vec<f64>,
}

impl GaussianPolicy {
    pub fn new(mean: Mlp, log_std: Vec<f64>) -> Self {
        assert_eq!(mean.output_dim(), log_std.len());
        Self { mean, log_std }
    }

    /// `state_dim → hidden… → action_dim` with orthogonal weights, a small
    /// output layer so the initial mean is near zero, and unit std.
    pub fn init<R: Rng + ?Sized>(state_dim: usize, hidden: &[usize], action_dim: usize, rng: &mut R) -> Self {
        let mut sizes = vec![state_dim];
        sizes.extend_from_slice(hidden);
        sizes.push(action_dim);
        Self::new(Mlp::orthogonal(&sizes, 0.01, rng), vec![0.0; action_dim])
    }

    pub fn state_dim(&self) -> usize {
        self.mean.input_dim()
    }

    pub fn action_dim(&self) -> usize {
        self.log_std.len()
    }

    pub fn n_params(&self) -> usize {
        self.mean.n_params() + self.log_std.len()
    }

    pub fn params(&self) -> ParamVector {
        let mut p = self.mean.params();
        p.extend_from_slice(&self.log_std);
        p
    }

    pub fn set_params(&mut self, p: &ParamVector) -> Result<()> {
        if p.len() != self.n_params() {
            return Err(Error::InputDimension {
                expected: self.n_params(),
                actual: p.len(),
            });
        }
        let n = self.mean.set_params(p)?;
        self.log_std.copy_from_slice(&p[n..]);
        Ok(())
    }

    pub fn with_params(&self, p: &ParamVector) -> Result<Self> {
        let mut out = self.clone();
        out.set_params(p)?;
        Ok(out)
    }

    pub fn distribution(&self, state: &[f64]) -> Result<DiagGaussian> {
        Ok(DiagGaussian {
            mean: self.mean.forward(state)?,
            log_std: self.log_std.clone(),
        })
    }

    pub fn log_prob(&self, state: &[f64], action: &[f64]) -> Result<f64> {
        self.check_action(action)?;
        Ok(self.distribution(state)?.log_prob(action))
    }

    /// Log-density and its gradient with respect to all parameters.
    pub fn grad_log_prob(&self, state: &[f64], action: &[f64]) -> Result<(f64, ParamVector)> {
        let mut grad = ParamVector::zeros(self.n_params());
        let lp = self.accumulate_grad_log_prob(state, action, 1.0, &mut grad)?;
        Ok((lp, grad))
    }

    /// Adds `weight * ∇ log π(action | state)` into `grad`; returns the log-density.
    pub fn accumulate_grad_log_prob(
        &self,
        state: &[f64],
        action: &[f64],
        weight: f64,
        grad: &mut [f64],
    ) -> Result<f64> {
        self.check_action(action)?;
        let trace = self.mean.trace(state)?;
        let mean = trace.output();
        let n_net = self.mean.n_params();
        let mut d_mean = Vec::with_capacity(mean.len());
        let mut lp = 0.0;
        let half_ln_2pi = 0.5 * (2.0 * PI).ln();
        for (i, ((m, ls), a)) in mean.iter().zip(&self.log_std).zip(action).enumerate() {
            let inv_var = (-2.0 * ls).exp();
            let diff = a - m;
            lp += -0.5 * diff * diff * inv_var - ls - half_ln_2pi;
            d_mean.push(weight * diff * inv_var);
            grad[n_net + i] += weight * (diff * diff * inv_var - 1.0);
        }
        self.mean.backward(&trace, &d_mean, &mut grad[..n_net]);
        Ok(lp)
    }

    /// `mean + std ⊙ z` with `z` standard normal.
    pub fn sample<R: Rng + ?Sized>(&self, state: &[f64], rng: &mut R) -> Result<Vec<f64>> {
        let mean = self.mean.forward(state)?;
        Ok(mean
            .iter()
            .zip(&self.log_std)
            .map(|(m, ls)| {
                let z: f64 = rng.sample(StandardNormal);
                m + ls.exp() * z
            })
            .collect())
    }

    /// Mean over `states` of KL(self ‖ other).
    pub fn mean_kl(&self, other: &GaussianPolicy, states: &[Vec<f64>]) -> Result<f64> {
        if states.is_empty() {
            return Ok(0.0);
        }
        let mut total = 0.0;
        for s in states {
            total += kl_diag_gaussian(&self.distribution(s)?, &other.distribution(s)?);
        }
        Ok(total / states.len() as f64)
    }

    /// Product of `v` with the Hessian of `θ ↦ mean_s KL(self ‖ π_θ)` at
    /// `θ = self`, i.e. the Fisher information of the policy.
    ///
    /// For the mean network this is `Jᵀ diag(1/σ²) J v` averaged over states;
    /// each log standard deviation contributes `2 v`.
    pub fn fisher_vector_product(&self, states: &[Vec<f64>], v: &ParamVector) -> Result<ParamVector> {
        let n_net = self.mean.n_params();
        let mut out = ParamVector::zeros(self.n_params());
        if states.is_empty() {
            return Ok(out);
        }
        let inv_var: Vec<f64> = self.log_std.iter().map(|ls| (-2.0 * ls).exp()).collect();
        let scale = 1.0 / states.len() as f64;
        for s in states {
            let trace = self.mean.trace(s)?;
            let jv = self.mean.jvp(&trace, &v[..n_net]);
            let w: Vec<f64> = jv.iter().zip(&inv_var).map(|(a, b)| scale * a * b).collect();
            self.mean.backward(&trace, &w, &mut out[..n_net]);
        }
        for (o, vi) in out[n_net..].iter_mut().zip(&v[n_net..]) {
            *o = 2.0 * vi;
        }
        Ok(out)
    }

    fn check_action(&self, action: &[f64]) -> Result<()> {
        if action.len() != self.action_dim() {
            return Err(Error::ActionDimension {
                expected: self.action_dim(),
                actual: action.len(),
            });
        }
        Ok(())
    }
}

/// Stacks equal-length rows into a matrix.
pub fn rows_to_matrix(rows: &[Vec<f64>], ncols: usize) -> Result<DMatrix<f64>> {
    if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
        return Err(Error::InputDimension {
            expected: ncols,
            actual: bad.len(),
        });
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

/// Batched evaluation, with states and actions as matrix rows.
impl GaussianPolicy {
    pub fn trace_batch(&self, states: &DMatrix<f64>) -> Result<BatchTrace> {
        self.mean.trace_batch(states)
    }

    /// Per-row log-densities given the rows' means.
    pub fn log_prob_rows(&self, means: &DMatrix<f64>, actions: &DMatrix<f64>) -> Vec<f64> {
        let half_ln_2pi = 0.5 * (2.0 * PI).ln();
        let mut lp = vec![-(self.log_std.iter().sum::<f64>() + half_ln_2pi * self.action_dim() as f64); means.nrows()];
        for (j, ls) in self.log_std.iter().enumerate() {
            let inv_std = (-ls).exp();
            for (l, (m, a)) in lp.iter_mut().zip(means.column(j).iter().zip(actions.column(j).iter())) {
                let z = (a - m) * inv_std;
                *l -= 0.5 * z * z;
            }
        }
        lp
    }

    /// Adds `Σ_i weights[i] · ∇ log π(actions_i | states_i)` into `grad`,
    /// where `trace` was computed by this policy on the states.
    pub fn accumulate_grad_log_prob_batch(
        &self,
        trace: &BatchTrace,
        actions: &DMatrix<f64>,
        weights: &[f64],
        grad: &mut [f64],
    ) {
        let means = trace.output();
        let n_net = self.mean.n_params();
        let mut d_mean = actions - means;
        for (j, ls) in self.log_std.iter().enumerate() {
            let inv_var = (-2.0 * ls).exp();
            let mut g_ls = 0.0;
            for (d, w) in d_mean.column_mut(j).iter_mut().zip(weights) {
                let z2 = *d * *d * inv_var;
                g_ls += w * (z2 - 1.0);
                *d *= w * inv_var;
            }
            grad[n_net + j] += g_ls;
        }
        self.mean.backward_batch(trace, &d_mean, &mut grad[..n_net]);
    }

    /// Mean over rows of KL(self ‖ other), given each policy's row means.
    pub fn mean_kl_rows(&self, own_means: &DMatrix<f64>, other: &GaussianPolicy, other_means: &DMatrix<f64>) -> f64 {
        let n = own_means.nrows();
        if n == 0 {
            return 0.0;
        }
        let mut total = 0.0;
        for (j, (lo, ln)) in self.log_std.iter().zip(&other.log_std).enumerate() {
            let var_ratio = (2.0 * (lo - ln)).exp();
            let inv_var_new = (-2.0 * ln).exp();
            let sq: f64 = own_means
                .column(j)
                .iter()
                .zip(other_means.column(j).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            total += n as f64 * (ln - lo + 0.5 * (var_ratio - 1.0)) + 0.5 * inv_var_new * sq;
        }
        total / n as f64
    }

    /// Fisher-vector products on a fixed set of states, reusing one forward
    /// pass for every product.
    pub fn fisher_operator(&self, states: &DMatrix<f64>) -> Result<FisherOperator<'_>> {
        Ok(FisherOperator {
            policy: self,
            trace: self.trace_batch(states)?,
        })
    }
}

/// See [`GaussianPolicy::fisher_operator`].
#[derive(Debug, Clone)]
pub struct FisherOperator<'a> {
    policy: &'a GaussianPolicy,
    trace: BatchTrace,
}

impl FisherOperator<'_> {
    /// Same result as [`GaussianPolicy::fisher_vector_product`].
    pub fn apply(&self, v: &ParamVector) -> ParamVector {
        let p = self.policy;
        let n_net = p.mean.n_params();
        let mut out = ParamVector::zeros(p.n_params());
        let n = self.trace.len();
        if n == 0 {
            return out;
        }
        {
            let mut jv = p.mean.jvp_batch(&self.trace, &v[..n_net]);
            for (j, ls) in p.log_std.iter().enumerate() {
                let w = (-2.0 * ls).exp() / n as f64;
                jv.column_mut(j).scale_mut(w);
            }
            p.mean.backward_batch(&self.trace, &jv, &mut out[..n_net]);
        }
        for (o, vi) in out[n_net..].iter_mut().zip(&v[n_net..]) {
            *o = 2.0 * vi;
        }
        out
    }
}
