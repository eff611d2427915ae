//! Batch policy-gradient solver: a Gaussian MLP policy trained with
//! generalized advantage estimation and trust-region policy optimization.

mod baseline;
mod batch;
mod cg;
mod gae;
mod train;
mod trpo;

pub use baseline::LinearBaseline;
pub use batch::{collect_batch, Batch, Path};
pub use cg::conjugate_gradient;
pub use gae::{discounted_returns, gae_advantages, normalize, GaeParams};
pub use train::{train, CurvePoint, DrlParams, TrainResult};
pub use trpo::{surrogate, surrogate_grad, trpo_update, SampleSet, TrpoParams, UpdateStats};
