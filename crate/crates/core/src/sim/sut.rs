//! The system under test: an Intelligent Driver Model that treats the nearest
//! in-road pedestrian ahead as its lead vehicle.

use serde::{Deserialize, Serialize};

use super::{RoadGeometry, TrackerState, VehicleState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IdmParams {
    /// Desired speed, m/s (25 mph).
    pub v0: f64,
    /// Desired time headway, s.
    pub time_headway: f64,
    /// Minimum standstill gap, m.
    pub s0: f64,
    /// Maximum acceleration, m/s².
    pub a_max: f64,
    /// Comfortable deceleration, m/s².
    pub b: f64,
    /// Hard braking limit, m/s². The output is clamped to `[-b_max, a_max]`.
    pub b_max: f64,
    /// Free-road exponent.
    pub delta: f64,
}

impl Default for IdmParams {
    fn default() -> Self {
        Self {
            v0: 11.17,
            time_headway: 1.5,
            s0: 2.0,
            a_max: 2.0,
            b: 2.0,
            b_max: 3.0,
            delta: 4.0,
        }
    }
}

impl IdmParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.v0 > 0.0
            && self.time_headway >= 0.0
            && self.s0 >= 0.0
            && self.a_max > 0.0
            && self.b > 0.0
            && self.b_max > 0.0
            && self.delta > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig("IDM parameters must be positive".into()))
        }
    }
}

/// What the SUT sees of its target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SutObservation {
    /// Relative x-velocity, SUT minus target.
    pub v_oth: f64,
    /// Target x minus the SUT's front bumper.
    pub s_headway: f64,
}

/// Picks the nearest tracked pedestrian that is on the road and ahead of the
/// front bumper. Pedestrians outside the road's y-extent are ignored.
pub fn select_target(
    tracks: &[TrackerState],
    vehicle: &VehicleState,
    road: &RoadGeometry,
) -> Option<SutObservation> {
    let front = vehicle.front();
    tracks
        .iter()
        .filter(|t| road.contains_y(t.y) && t.x > front)
        .map(|t| SutObservation {
            v_oth: vehicle.v - t.vx,
            s_headway: t.x - front,
        })
        .min_by(|a, b| a.s_headway.total_cmp(&b.s_headway))
}

/// IDM acceleration, clamped to `[-b_max, a_max]`.
pub fn idm_accel(obs: Option<&SutObservation>, v: f64, p: &IdmParams) -> f64 {
    let free = 1.0 - (v / p.v0).powf(p.delta);
    let accel = match obs {
        None => p.a_max * free,
        Some(o) if o.s_headway <= 0.0 => -p.b_max,
        Some(o) => {
            let dynamic = v * p.time_headway + v * o.v_oth / (2.0 * (p.a_max * p.b).sqrt());
            let s_star = p.s0 + dynamic.max(0.0);
            p.a_max * (free - (s_star / o.s_headway).powi(2))
        }
    };
    accel.clamp(-p.b_max, p.a_max)
}
