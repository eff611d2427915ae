//! Fixed-gain alpha-beta tracking of pedestrian positions.

use serde::{Deserialize, Serialize};

use super::Measurement;

/// Filtered estimate of one pedestrian, one independent alpha-beta filter
/// per axis. Only position measurements drive the filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackerState {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl TrackerState {
    /// Starts the filter at a measurement, taking its velocity as the initial
    /// rate estimate.
    pub fn from_measurement(m: &Measurement, alpha: f64, beta: f64) -> Self {
        debug_assert!(alpha > 0.0 && alpha <= 1.0);
        debug_assert!((0.0..1.0).contains(&beta));
        Self {
            x: m.x,
            y: m.y,
            vx: m.vx,
            vy: m.vy,
            alpha,
            beta,
        }
    }

    pub fn step(&self, m: &Measurement, dt: f64) -> Self {
        let (x, vx) = axis(self.x, self.vx, m.x, self.alpha, self.beta, dt);
        let (y, vy) = axis(self.y, self.vy, m.y, self.alpha, self.beta, dt);
        Self { x, y, vx, vy, ..*self }
    }
}

fn axis(pos: f64, rate: f64, measured: f64, alpha: f64, beta: f64, dt: f64) -> (f64, f64) {
    let predicted = pos + rate * dt;
    let residual = measured - predicted;
    (predicted + alpha * residual, rate + beta / dt * residual)
}
