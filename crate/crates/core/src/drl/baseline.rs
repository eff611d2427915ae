use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Value baseline linear in hand-made features of the (scaled) observation and
/// the time index: `[clip(s), s², t/T, (t/T)², (t/T)³, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearBaseline {
    pub coeffs: Option<Vec<f64>>,
    /// Ridge coefficient; raised tenfold until the solve succeeds.
    pub reg: f64,
    pub horizon: usize,
}

const CLIP: f64 = 10.0;

impl LinearBaseline {
    pub fn new(reg: f64, horizon: usize) -> Self {
        Self {
            coeffs: None,
            reg,
            horizon,
        }
    }

    pub fn features(&self, state: &[f64], t: usize) -> Vec<f64> {
        let tt = t as f64 / self.horizon.max(1) as f64;
        let mut f = Vec::with_capacity(2 * state.len() + 4);
        f.extend(state.iter().map(|s| s.clamp(-CLIP, CLIP)));
        f.extend(state.iter().map(|s| {
            let c = s.clamp(-CLIP, CLIP);
            c * c
        }));
        f.extend_from_slice(&[tt, tt * tt, tt * tt * tt, 1.0]);
        f
    }

    /// Value of `state` at time `t`; zero before the first fit.
    pub fn predict(&self, state: &[f64], t: usize) -> f64 {
        match &self.coeffs {
            Some(c) => self.features(state, t).iter().zip(c).map(|(a, b)| a * b).sum(),
            None => 0.0,
        }
    }

    /// Predictions for each state of an episode.
    pub fn predict_path(&self, states: &[Vec<f64>]) -> Vec<f64> {
        states.iter().enumerate().map(|(t, s)| self.predict(s, t)).collect()
    }

    /// Ridge least-squares fit of `targets` on the features of `(states, t)`
    /// pairs, where each episode's time index restarts at zero.
    pub fn fit(&mut self, paths: &[(&[Vec<f64>], &[f64])]) -> Result<()> {
        let rows: usize = paths.iter().map(|(s, _)| s.len()).sum();
        if rows == 0 {
            return Ok(());
        }
        let dim = paths
            .iter()
            .find_map(|(s, _)| s.first())
            .map(|s| self.features(s, 0).len())
            .unwrap_or(4);
        let mut x = DMatrix::<f64>::zeros(rows, dim);
        let mut y = DVector::<f64>::zeros(rows);
        let mut row = 0;
        for (states, targets) in paths {
            for (t, (s, target)) in states.iter().zip(targets.iter()).enumerate() {
                for (j, v) in self.features(s, t).into_iter().enumerate() {
                    x[(row, j)] = v;
                }
                y[row] = *target;
                row += 1;
            }
        }
        let xtx = x.transpose() * &x;
        let xty = x.transpose() * &y;
        let mut reg = self.reg;
        for _ in 0..5 {
            let mut a = xtx.clone();
            for j in 0..dim {
                a[(j, j)] += reg;
            }
            if let Some(chol) = a.cholesky() {
                let sol = chol.solve(&xty);
                if sol.iter().all(|v| v.is_finite()) {
                    self.coeffs = Some(sol.iter().copied().collect());
                    return Ok(());
                }
            }
            reg *= 10.0;
        }
        Err(Error::NonFinite("baseline fit"))
    }
}
