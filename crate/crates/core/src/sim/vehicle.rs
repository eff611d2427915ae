use serde::{Deserialize, Serialize};

use super::PedestrianState;

/// The SUT vehicle. `x`/`y` locate the geometric centre of its footprint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    pub v: f64,
    pub length: f64,
    pub width: f64,
}

impl Default for VehicleState {
    fn default() -> Self {
        Self {
            x: -35.0,
            y: 0.0,
            v: 11.17,
            length: 4.5,
            width: 1.8,
        }
    }
}

impl VehicleState {
    pub fn front(&self) -> f64 {
        self.x + 0.5 * self.length
    }

    /// Semi-implicit Euler without reversing.
    pub fn step(&self, accel: f64, dt: f64) -> Self {
        let v = (self.v + accel * dt).max(0.0);
        Self {
            v,
            x: self.x + v * dt,
            ..*self
        }
    }

    /// Distance from the vehicle centre to a pedestrian.
    pub fn distance_to(&self, p: &PedestrianState) -> f64 {
        (p.x - self.x).hypot(p.y - self.y)
    }
}

/// True if any pedestrian lies inside the vehicle footprint inflated by the
/// pedestrian radius. Boundary points count as collisions.
pub fn collision_check(vehicle: &VehicleState, pedestrians: &[PedestrianState], radius: f64) -> bool {
    let hx = 0.5 * vehicle.length + radius;
    let hy = 0.5 * vehicle.width + radius;
    pedestrians
        .iter()
        .any(|p| (p.x - vehicle.x).abs() <= hx && (p.y - vehicle.y).abs() <= hy)
}
