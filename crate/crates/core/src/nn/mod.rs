//! Small feed-forward networks and diagonal Gaussian policies with
//! hand-derived gradients.
//!
//! Parameters are exposed as a flat [`ParamVector`] in a fixed order: for each
//! layer its weight matrix (row-major, `out × in`) then its bias; for a
//! [`GaussianPolicy`] the mean network's parameters are followed by the
//! per-dimension log standard deviations.

mod checkpoint;
mod gaussian;
mod mlp;
mod params;

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC};
pub use gaussian::{kl_diag_gaussian, rows_to_matrix, DiagGaussian, FisherOperator, GaussianPolicy};
pub use mlp::{Activation, BatchTrace, Mlp, Trace};
pub use params::ParamVector;
