use serde::{Deserialize, Serialize};

use super::PedestrianState;

/// A noisy reading of one pedestrian, in the same `[v_x, v_y, x, y]` layout
/// as [`PedestrianState`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub vx: f64,
    pub vy: f64,
    pub x: f64,
    pub y: f64,
}

/// Sensor noise for one pedestrian.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SensorNoise {
    pub vx: f64,
    pub vy: f64,
    pub x: f64,
    pub y: f64,
}

/// Adds the injected noise to each pedestrian's true state. No clipping.
pub fn sense(pedestrians: &[PedestrianState], noise: &[SensorNoise]) -> Vec<Measurement> {
    debug_assert_eq!(pedestrians.len(), noise.len());
    pedestrians
        .iter()
        .zip(noise)
        .map(|(p, e)| Measurement {
            vx: p.vx + e.vx,
            vy: p.vy + e.vy,
            x: p.x + e.x,
            y: p.y + e.y,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_noise_is_identity() {
        let p = [PedestrianState::new(0.1, 1.4, -0.5, 2.0)];
        let m = sense(&p, &[SensorNoise::default()]);
        assert_eq!(m[0], Measurement { vx: 0.1, vy: 1.4, x: -0.5, y: 2.0 });
    }

    #[test]
    fn additive() {
        let p = [PedestrianState::new(0.0, 0.0, 0.0, 0.0)];
        let m = sense(
            &p,
            &[SensorNoise {
                x: 0.1,
                ..Default::default()
            }],
        );
        assert_eq!(m[0].x, 0.1);
        assert_eq!((m[0].vx, m[0].vy, m[0].y), (0.0, 0.0, 0.0));
    }
}
