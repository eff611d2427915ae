use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A per-step environment disturbance.
///
/// For the crosswalk world this is one block of six values per pedestrian:
/// `[a_x, a_y, eps_vx, eps_vy, eps_x, eps_y]` (accelerations in m/s², velocity
/// noise in m/s, position noise in m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EnvAction(Vec<f64>);

impl EnvAction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("environment action"));
        }
        Ok(Self(values))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.0.len() != expected {
            return Err(Error::ActionDimension {
                expected,
                actual: self.0.len(),
            });
        }
        Ok(())
    }
}

impl AsRef<[f64]> for EnvAction {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}
