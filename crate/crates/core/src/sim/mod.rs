//! The crosswalk world: pedestrians crossing a two-lane road in front of a
//! vehicle driven by a modified Intelligent Driver Model that sees them
//! through a noisy sensor and an alpha-beta tracker.

mod config;
mod likelihood;
mod pedestrian;
mod sensor;
mod sut;
mod tracker;
mod vehicle;
mod world;

pub use config::{RoadGeometry, ScenarioConfig, TrackerParams};
pub use likelihood::mahalanobis;
pub use pedestrian::PedestrianState;
pub use sensor::{sense, Measurement, SensorNoise};
pub use sut::{idm_accel, select_target, IdmParams, SutObservation};
pub use tracker::TrackerState;
pub use vehicle::{collision_check, VehicleState};
pub use world::{sim_step, CrosswalkSim, SimulatorState};
