use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::ast::EnvAction;

/// Draws a full environment action from independent zero-mean Gaussians with
/// the given variances, using a generator seeded by `seed`. All pedestrians'
/// blocks come from the same stream.
pub fn seed_to_action(seed: u64, variances: &[f64]) -> EnvAction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = variances
        .iter()
        .map(|var| {
            let z: f64 = rng.sample(StandardNormal);
            var.sqrt() * z
        })
        .collect();
    EnvAction::new(values).expect("gaussian draws are finite")
}

#[cfg(test)]
mod tests {
    use super::*;

    const VAR: [f64; 6] = [0.01, 0.1, 0.1, 0.1, 0.1, 0.1];

    #[test]
    fn same_seed_same_action() {
        assert_eq!(seed_to_action(42, &VAR), seed_to_action(42, &VAR));
        assert_ne!(seed_to_action(42, &VAR), seed_to_action(43, &VAR));
    }

    #[test]
    fn empirical_variance() {
        let n = 100_000;
        let mut sum = [0.0; 6];
        let mut sq = [0.0; 6];
        for s in 0..n {
            let a = seed_to_action(s as u64 ^ 0x9e37_79b9_7f4a_7c15, &VAR);
            for (i, v) in a.as_slice().iter().enumerate() {
                sum[i] += v;
                sq[i] += v * v;
            }
        }
        for i in 0..6 {
            let mean = sum[i] / n as f64;
            let var = sq[i] / n as f64 - mean * mean;
            assert!(
                (var / VAR[i] - 1.0).abs() < 0.05,
                "component {i}: variance {var} vs {}",
                VAR[i]
            );
        }
    }
}
