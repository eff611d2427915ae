use serde::{Deserialize, Serialize};

use super::likelihood::mahalanobis;
use super::{
    collision_check, idm_accel, select_target, sense, Measurement, PedestrianState,
    ScenarioConfig, SensorNoise, TrackerState, VehicleState,
};
use crate::ast::{EnvAction, Simulator, TransitionOutcome};
use crate::{Error, Result};

/// Full state of the crosswalk world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatorState {
    pub pedestrians: Vec<PedestrianState>,
    pub vehicle: VehicleState,
    pub tracks: Vec<TrackerState>,
    /// Most recent sensor readings, including the raw velocity channel.
    pub measurements: Vec<Measurement>,
    pub steps: usize,
    pub collided: bool,
}

impl SimulatorState {
    pub fn initial(cfg: &ScenarioConfig) -> Self {
        let noiseless = sense(
            &cfg.pedestrians,
            &vec![SensorNoise::default(); cfg.pedestrians.len()],
        );
        let tracks = noiseless
            .iter()
            .map(|m| TrackerState::from_measurement(m, cfg.tracker.alpha, cfg.tracker.beta))
            .collect();
        Self {
            pedestrians: cfg.pedestrians.clone(),
            vehicle: cfg.vehicle,
            tracks,
            measurements: noiseless,
            steps: 0,
            collided: false,
        }
    }

    /// Distance from the vehicle centre to the nearest pedestrian.
    pub fn nearest_distance(&self) -> f64 {
        self.pedestrians
            .iter()
            .map(|p| self.vehicle.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }
}

/// The crosswalk simulator.
///
/// One step runs the pipeline pedestrian dynamics → sensor → tracker →
/// target selection → IDM → vehicle dynamics → collision check, then scores
/// the action's likelihood.
#[derive(Debug, Clone)]
pub struct CrosswalkSim {
    config: ScenarioConfig,
    variances: Vec<f64>,
    state: SimulatorState,
}

impl CrosswalkSim {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let variances = config.action_variances();
        let state = SimulatorState::initial(&config);
        Ok(Self {
            config,
            variances,
            state,
        })
    }

    pub fn preset(id: u32) -> Result<Self> {
        Self::new(ScenarioConfig::preset(id)?)
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn state(&self) -> &SimulatorState {
        &self.state
    }

    /// Diagonal of the action covariance.
    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    fn terminal(&self) -> bool {
        self.state.collided || self.state.steps >= self.config.horizon
    }
}

/// Applies one environment action to `state`.
pub fn sim_step(
    cfg: &ScenarioConfig,
    variances: &[f64],
    state: &mut SimulatorState,
    action: &EnvAction,
) -> Result<TransitionOutcome> {
    action.check_dim(cfg.action_dim())?;
    let a = action.as_slice();
    let dt = cfg.dt;

    let mut noise = Vec::with_capacity(state.pedestrians.len());
    for (p, block) in state.pedestrians.iter_mut().zip(a.chunks_exact(6)) {
        *p = p.step(block[0], block[1], dt);
        noise.push(SensorNoise {
            vx: block[2],
            vy: block[3],
            x: block[4],
            y: block[5],
        });
    }

    state.measurements = sense(&state.pedestrians, &noise);
    for (t, m) in state.tracks.iter_mut().zip(&state.measurements) {
        *t = t.step(m, dt);
    }

    let target = select_target(&state.tracks, &state.vehicle, &cfg.road);
    let accel = idm_accel(target.as_ref(), state.vehicle.v, &cfg.idm);
    state.vehicle = state.vehicle.step(accel, dt);

    state.collided = collision_check(&state.vehicle, &state.pedestrians, cfg.pedestrian_radius);
    state.steps += 1;

    Ok(TransitionOutcome {
        mahalanobis: mahalanobis(a, variances),
        event: state.collided,
        dist: state.nearest_distance(),
        terminal: state.collided || state.steps >= cfg.horizon,
    })
}

impl Simulator for CrosswalkSim {
    fn initialize(&mut self) {
        self.state = SimulatorState::initial(&self.config);
    }

    fn step(&mut self, action: &EnvAction) -> Result<TransitionOutcome> {
        if self.terminal() {
            return Err(Error::StepAfterTerminal {
                steps: self.state.steps,
            });
        }
        sim_step(&self.config, &self.variances, &mut self.state, action)
    }

    fn is_terminal(&self) -> bool {
        self.terminal()
    }

    /// Per pedestrian: velocity and position relative to the vehicle,
    /// `[v_x - v_vehicle, v_y, x - x_vehicle, y - y_vehicle]`.
    fn observe(&self) -> Vec<f64> {
        let veh = &self.state.vehicle;
        self.state
            .pedestrians
            .iter()
            .flat_map(|p| [p.vx - veh.v, p.vy, p.x - veh.x, p.y - veh.y])
            .collect()
    }

    fn action_dim(&self) -> usize {
        self.config.action_dim()
    }

    fn observation_dim(&self) -> usize {
        4 * self.config.pedestrian_count()
    }

    fn horizon(&self) -> usize {
        self.config.horizon
    }

    fn noise_free_mahalanobis(&self, action: &EnvAction) -> f64 {
        let quiet: Vec<f64> = action
            .as_slice()
            .chunks_exact(6)
            .flat_map(|b| [b[0], b[1], 0.0, 0.0, 0.0, 0.0])
            .collect();
        mahalanobis(&quiet, &self.variances)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{rollout, RewardParams, StepMeter, ZeroActions};

    fn nominal(id: u32) -> (CrosswalkSim, crate::ast::Trajectory) {
        let mut sim = CrosswalkSim::preset(id).unwrap();
        let mut meter = StepMeter::new();
        let dim = sim.action_dim();
        let traj = rollout(&mut sim, &mut ZeroActions(dim), &RewardParams::default(), &mut meter).unwrap();
        (sim, traj)
    }

    #[test]
    fn initial_state() {
        let sim = CrosswalkSim::preset(1).unwrap();
        let s = sim.state();
        assert_eq!(s.steps, 0);
        assert_eq!(s.pedestrians[0], PedestrianState::new(0.0, 1.4, 0.0, -2.0));
        assert_eq!((s.tracks[0].x, s.tracks[0].y), (0.0, -2.0));
        assert_eq!((s.tracks[0].vx, s.tracks[0].vy), (0.0, 1.4));
        assert_eq!(s.vehicle, VehicleState::default());
    }

    #[test]
    fn scenario_two_collides_on_mean_behavior() {
        let (_, traj) = nominal(2);
        assert!(traj.is_collision());
        assert_eq!(traj.total_reward, 0.0);
    }

    #[test]
    fn scenario_one_yields_on_mean_behavior() {
        let (_, traj) = nominal(1);
        assert!(!traj.is_collision());
        assert_eq!(traj.len(), 100);
    }

    #[test]
    fn step_counter_and_terminal() {
        let mut sim = CrosswalkSim::preset(1).unwrap();
        let zero = EnvAction::zeros(6);
        for k in 1..=100 {
            assert!(!sim.is_terminal());
            sim.step(&zero).unwrap();
            assert_eq!(sim.state().steps, k);
        }
        assert!(sim.is_terminal());
        assert!(matches!(sim.step(&zero), Err(Error::StepAfterTerminal { steps: 100 })));
    }

    #[test]
    fn pedestrian_on_vehicle_collides_immediately() {
        let mut cfg = ScenarioConfig::preset(1).unwrap();
        cfg.pedestrians[0] = PedestrianState::new(0.0, 0.0, cfg.vehicle.x + 1.5, 0.0);
        let mut sim = CrosswalkSim::new(cfg).unwrap();
        let out = sim.step(&EnvAction::zeros(6)).unwrap();
        assert!(out.event && out.terminal);
        assert!(sim.is_terminal());
    }

    #[test]
    fn dimension_mismatch() {
        let mut sim = CrosswalkSim::preset(3).unwrap();
        assert!(matches!(
            sim.step(&EnvAction::zeros(6)),
            Err(Error::ActionDimension { expected: 12, actual: 6 })
        ));
    }

    #[test]
    fn noise_only_affects_measurements() {
        let mut quiet = CrosswalkSim::preset(3).unwrap();
        let mut noisy = CrosswalkSim::preset(3).unwrap();
        let a = [0.05, -0.1, 0.0, 0.0, 0.0, 0.0, -0.02, 0.2, 0.0, 0.0, 0.0, 0.0];
        let mut b = a;
        for i in [2, 3, 4, 5, 8, 9, 10, 11] {
            b[i] = 0.3 * (i as f64 - 6.0);
        }
        for _ in 0..30 {
            if quiet.is_terminal() || noisy.is_terminal() {
                break;
            }
            quiet.step(&EnvAction::new(a.to_vec()).unwrap()).unwrap();
            noisy.step(&EnvAction::new(b.to_vec()).unwrap()).unwrap();
            assert_eq!(quiet.state().pedestrians, noisy.state().pedestrians);
        }
        assert_ne!(quiet.state().measurements, noisy.state().measurements);
    }

    #[test]
    fn observation_is_relative() {
        let sim = CrosswalkSim::preset(1).unwrap();
        let o = sim.observe();
        assert_eq!(o, vec![0.0 - 11.17, 1.4, 35.0, -2.0]);
        assert_eq!(o.len(), sim.observation_dim());
    }

    #[test]
    fn noise_free_likelihood_drops_noise_terms() {
        let sim = CrosswalkSim::preset(1).unwrap();
        let a = EnvAction::new(vec![0.1, 0.0, 0.5, 0.5, 0.5, 0.5]).unwrap();
        assert!((sim.noise_free_mahalanobis(&a) - 1.0).abs() < 1e-12);
    }
}
