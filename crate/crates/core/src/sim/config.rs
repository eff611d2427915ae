use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{IdmParams, PedestrianState, VehicleState};
use crate::{Error, Result};

/// Road and crosswalk geometry. The origin sits on the crosswalk's centre line
/// and the bottom lane's centre line; `+x` is the vehicle's direction of travel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RoadGeometry {
    pub lane_width: f64,
    pub crosswalk_half_width: f64,
    pub road_y_min: f64,
    pub road_y_max: f64,
}

impl Default for RoadGeometry {
    fn default() -> Self {
        // Two 3.7 m lanes, bottom lane centred on y = 0.
        Self {
            lane_width: 3.7,
            crosswalk_half_width: 1.5,
            road_y_min: -1.85,
            road_y_max: 5.55,
        }
    }
}

impl RoadGeometry {
    pub fn contains_y(&self, y: f64) -> bool {
        y >= self.road_y_min && y <= self.road_y_max
    }

    /// x coordinate of the crosswalk edge the vehicle reaches first.
    pub fn crosswalk_near_edge(&self) -> f64 {
        -self.crosswalk_half_width
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerParams {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for TrackerParams {
    fn default() -> Self {
        Self {
            alpha: 0.85,
            beta: 0.005,
        }
    }
}

/// Everything needed to build a crosswalk world. Serialized as JSON with SI
/// units; omitted fields take the defaults (scenario 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub pedestrians: Vec<PedestrianState>,
    pub vehicle: VehicleState,
    /// Time step in seconds.
    pub dt: f64,
    /// Episode length in steps.
    pub horizon: usize,
    /// Variance of lateral (x) pedestrian acceleration.
    pub sigma_a_lat: f64,
    /// Variance of longitudinal (y, across the street) pedestrian acceleration.
    pub sigma_a_lon: f64,
    /// Variance of every sensor noise component.
    pub sigma_noise: f64,
    pub road: RoadGeometry,
    pub idm: IdmParams,
    pub tracker: TrackerParams,
    pub pedestrian_radius: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            pedestrians: vec![PedestrianState::new(0.0, 1.4, 0.0, -2.0)],
            vehicle: VehicleState::default(),
            dt: 0.1,
            horizon: 100,
            sigma_a_lat: 0.01,
            sigma_a_lon: 0.1,
            sigma_noise: 0.1,
            road: RoadGeometry::default(),
            idm: IdmParams::default(),
            tracker: TrackerParams::default(),
            pedestrian_radius: 0.3,
        }
    }
}

impl ScenarioConfig {
    /// One of the three crosswalk presets.
    pub fn preset(id: u32) -> Result<Self> {
        let pedestrians = match id {
            1 => vec![PedestrianState::new(0.0, 1.4, 0.0, -2.0)],
            2 => vec![PedestrianState::new(0.0, 1.4, 0.0, -4.0)],
            3 => vec![
                PedestrianState::new(0.0, 1.4, 0.0, -2.0),
                PedestrianState::new(0.0, -1.4, 0.0, 5.0),
            ],
            other => return Err(Error::UnknownScenario(other)),
        };
        Ok(Self {
            pedestrians,
            ..Default::default()
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn pedestrian_count(&self) -> usize {
        self.pedestrians.len()
    }

    /// Action dimension: six disturbance components per pedestrian.
    pub fn action_dim(&self) -> usize {
        6 * self.pedestrians.len()
    }

    /// Diagonal of the action covariance, in action-vector order.
    pub fn action_variances(&self) -> Vec<f64> {
        let block = [
            self.sigma_a_lat,
            self.sigma_a_lon,
            self.sigma_noise,
            self.sigma_noise,
            self.sigma_noise,
            self.sigma_noise,
        ];
        block
            .iter()
            .copied()
            .cycle()
            .take(self.action_dim())
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.pedestrians.is_empty() {
            return bad("at least one pedestrian is required");
        }
        if !(self.dt > 0.0) {
            return bad("dt must be positive");
        }
        if self.horizon == 0 {
            return bad("horizon must be at least 1");
        }
        if !(self.sigma_a_lat > 0.0 && self.sigma_a_lon > 0.0 && self.sigma_noise > 0.0) {
            return bad("all variances must be positive");
        }
        let t = &self.tracker;
        if !(t.alpha > 0.0 && t.alpha <= 1.0) || !(t.beta >= 0.0 && t.beta < 1.0) {
            return bad("tracker gains must satisfy 0 < alpha <= 1 and 0 <= beta < 1");
        }
        if !(self.vehicle.v >= 0.0) || !(self.vehicle.length > 0.0) || !(self.vehicle.width > 0.0) {
            return bad("vehicle speed must be non-negative and dimensions positive");
        }
        if !(self.road.road_y_max > self.road.road_y_min) {
            return bad("road y-extent is empty");
        }
        if !(self.pedestrian_radius >= 0.0) {
            return bad("pedestrian radius must be non-negative");
        }
        self.idm.validate()?;
        let finite = self
            .pedestrians
            .iter()
            .all(|p| p.vx.is_finite() && p.vy.is_finite() && p.x.is_finite() && p.y.is_finite());
        if !finite {
            return bad("pedestrian states must be finite");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let s1 = ScenarioConfig::preset(1).unwrap();
        assert_eq!(s1.pedestrians, vec![PedestrianState::new(0.0, 1.4, 0.0, -2.0)]);
        let s2 = ScenarioConfig::preset(2).unwrap();
        assert_eq!(s2.pedestrians, vec![PedestrianState::new(0.0, 1.4, 0.0, -4.0)]);
        let s3 = ScenarioConfig::preset(3).unwrap();
        assert_eq!(
            s3.pedestrians,
            vec![
                PedestrianState::new(0.0, 1.4, 0.0, -2.0),
                PedestrianState::new(0.0, -1.4, 0.0, 5.0),
            ]
        );
        assert_eq!(s3.action_dim(), 12);
        assert!(matches!(ScenarioConfig::preset(4), Err(Error::UnknownScenario(4))));
    }

    #[test]
    fn variances_follow_block_layout() {
        let s3 = ScenarioConfig::preset(3).unwrap();
        let v = s3.action_variances();
        assert_eq!(&v[..6], &[0.01, 0.1, 0.1, 0.1, 0.1, 0.1]);
        assert_eq!(&v[6..], &v[..6]);
    }

    #[test]
    fn json_defaults_fill_missing_fields() {
        let cfg = ScenarioConfig::from_json(r#"{"horizon": 50, "idm": {"v0": 10.0}}"#).unwrap();
        assert_eq!(cfg.horizon, 50);
        assert_eq!(cfg.idm.v0, 10.0);
        assert_eq!(cfg.idm.s0, IdmParams::default().s0);
        assert_eq!(cfg.dt, 0.1);
        assert_eq!(cfg.pedestrians.len(), 1);

        let round = ScenarioConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(round, cfg);
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(ScenarioConfig::from_json(r#"{"dt": 0.0}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"pedestrians": []}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"sigma_noise": -1.0}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"tracker": {"alpha": 0.0}}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"dt": "fast"}"#).is_err());
    }
}
