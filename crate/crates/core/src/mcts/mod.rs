//! Monte Carlo tree search with progressive widening over pseudorandom seeds.
//!
//! The solver never looks inside the simulator. Each tree edge is a 64-bit
//! seed; the environment action for that step is drawn from the action model
//! with a generator seeded by it, so a node is identified by the seed history
//! from the root and is revisited by replaying that history.
//!
//! Transitions are deterministic given the action, so only the action side of
//! double progressive widening is needed: a node with `N` visits may hold at
//! most `k · N^α + 1` children.

mod search;
mod seed;
mod tree;

pub use search::{search, DpwParams, SearchResult};
pub use seed::seed_to_action;
pub use tree::{Node, SearchTree};
