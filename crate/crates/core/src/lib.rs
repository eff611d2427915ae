//! Adaptive stress testing for an autonomous vehicle approaching a pedestrian
//! crosswalk.
//!
//! The environment (pedestrian motion and sensor noise) is treated as an
//! adversary whose per-step disturbance vector fixes every stochastic element
//! of the simulator. Searching over disturbance sequences for the most likely
//! one that ends in a collision is then a deterministic sequential decision
//! problem, solved here two ways:
//!
//! * [`mcts`]: Monte Carlo tree search with progressive widening over
//!   pseudorandom seeds, treating the simulator as a black box keyed by seed
//!   history.
//! * [`drl`]: a Gaussian MLP policy trained with generalized advantage
//!   estimation and a KL-constrained trust-region step.
//!
//! [`ast`] holds the simulator contract, reward, and rollout/replay machinery
//! shared by both solvers; [`sim`] is the concrete crosswalk world.

pub mod ast;
pub mod drl;
pub mod error;
pub mod mcts;
pub mod nn;
pub mod sim;

pub use error::{Error, Result};
