use serde::{Deserialize, Serialize};

/// True kinematic state of a pedestrian, ordered `[v_x, v_y, x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PedestrianState {
    pub vx: f64,
    pub vy: f64,
    pub x: f64,
    pub y: f64,
}

impl PedestrianState {
    pub const fn new(vx: f64, vy: f64, x: f64, y: f64) -> Self {
        Self { vx, vy, x, y }
    }

    /// Semi-implicit Euler: velocity first, then position with the new velocity.
    pub fn step(&self, ax: f64, ay: f64, dt: f64) -> Self {
        let vx = self.vx + ax * dt;
        let vy = self.vy + ay * dt;
        Self {
            vx,
            vy,
            x: self.x + vx * dt,
            y: self.y + vy * dt,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_velocity() {
        let p = PedestrianState::new(0.0, 1.4, 0.0, -2.0).step(0.0, 0.0, 0.1);
        assert_eq!(p.vx, 0.0);
        assert_eq!(p.vy, 1.4);
        assert_eq!(p.x, 0.0);
        assert!((p.y - (-2.0 + 0.14)).abs() < 1e-15);
    }

    #[test]
    fn acceleration_from_rest() {
        let p = PedestrianState::new(0.0, 0.0, 0.0, 0.0).step(1.0, 0.0, 0.1);
        assert!((p.vx - 0.1).abs() < 1e-15);
        assert!((p.x - 0.01).abs() < 1e-15);
        assert_eq!(p.y, 0.0);
    }

    #[test]
    fn zero_action_preserves_speed() {
        let mut p = PedestrianState::new(0.3, -1.1, 2.0, 4.0);
        for _ in 0..100 {
            p = p.step(0.0, 0.0, 0.1);
        }
        assert_eq!((p.vx, p.vy), (0.3, -1.1));
    }
}
