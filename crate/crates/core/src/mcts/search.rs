use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{seed_to_action, SearchTree};
use crate::ast::{best_within, replay, reward, BestPoint, RewardParams, Simulator, StepMeter, Trajectory};
use crate::{Error, Result};

/// Search parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DpwParams {
    /// Widening coefficient `k`.
    pub k: f64,
    /// Widening exponent `α`.
    pub alpha: f64,
    /// UCT exploration constant.
    pub exploration: f64,
    /// Simulations run from each committed root before the next action is
    /// committed.
    pub iterations: usize,
    /// Stop once this many simulator steps have been spent.
    pub max_steps: Option<u64>,
    /// Seed of the generator that proposes edge and rollout seeds.
    pub seed: u64,
}

impl Default for DpwParams {
    fn default() -> Self {
        Self {
            k: 1.0,
            alpha: 0.5,
            exploration: 100.0,
            iterations: 2000,
            max_steps: None,
            seed: 0,
        }
    }
}

impl DpwParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("mcts: {m}")));
        if !(self.k.is_finite() && self.k > 0.0) {
            return bad("k must be positive");
        }
        if !(self.alpha.is_finite() && (0.0..=1.0).contains(&self.alpha)) {
            return bad("alpha must lie in [0, 1]");
        }
        if !(self.exploration.is_finite() && self.exploration >= 0.0) {
            return bad("exploration must be non-negative");
        }
        if self.iterations == 0 {
            return bad("iterations must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    /// Highest-reward trajectory over every simulation, rebuilt by replay.
    pub best: Option<Trajectory>,
    pub best_seeds: Vec<u64>,
    /// One entry per improvement of the best reward.
    pub history: Vec<BestPoint>,
    /// Seeds committed by the receding-horizon loop.
    pub committed: Vec<u64>,
    pub simulations: u64,
    pub tree: SearchTree,
}

impl SearchResult {
    /// Best reward among improvements found within `steps` simulator calls.
    pub fn best_within(&self, steps: u64) -> Option<BestPoint> {
        best_within(&self.history, steps)
    }

    /// Step count at which the first colliding trajectory was completed.
    pub fn first_collision_steps(&self) -> Option<u64> {
        self.history.iter().find(|p| p.collision).map(|p| p.steps)
    }
}

struct Simulation {
    total: f64,
    collision: bool,
}

/// Runs receding-horizon MCTS over seeds against `sim`.
///
/// Every simulation resets the simulator and replays the committed prefix, so
/// all step calls, including those replays, are charged to `meter`.
pub fn search<S>(
    sim: &mut S,
    variances: &[f64],
    reward_params: &RewardParams,
    params: &DpwParams,
    meter: &mut StepMeter,
) -> Result<SearchResult>
where
    S: Simulator + ?Sized,
{
    params.validate()?;
    if variances.len() != sim.action_dim() {
        return Err(Error::ActionDimension {
            expected: sim.action_dim(),
            actual: variances.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut tree = SearchTree::new();
    let mut root = SearchTree::ROOT;
    let mut committed: Vec<u64> = Vec::new();
    let mut best_reward = f64::NEG_INFINITY;
    let mut best_seeds: Vec<u64> = Vec::new();
    let mut history = Vec::new();
    let mut simulations = 0u64;
    let mut path = Vec::new();
    let mut rewards = Vec::new();
    let mut rollout_seeds = Vec::new();

    let exhausted = |m: &StepMeter| params.max_steps.is_some_and(|cap| m.count() >= cap);

    'outer: loop {
        for _ in 0..params.iterations {
            if exhausted(meter) {
                break 'outer;
            }
            path.clear();
            rewards.clear();
            rollout_seeds.clear();
            let sim_out = simulate(
                sim,
                variances,
                reward_params,
                params,
                meter,
                &mut rng,
                &mut tree,
                root,
                &committed,
                &mut path,
                &mut rewards,
                &mut rollout_seeds,
            )?;
            simulations += 1;
            if sim_out.total > best_reward {
                best_reward = sim_out.total;
                best_seeds.clear();
                best_seeds.extend_from_slice(&committed);
                best_seeds.extend(path.iter().map(|&n| tree.node(n).seed));
                best_seeds.extend_from_slice(&rollout_seeds);
                history.push(BestPoint {
                    steps: meter.count(),
                    reward: best_reward,
                    collision: sim_out.collision,
                });
            }
        }
        match tree.best_child(root) {
            Some(next) if !tree.node(next).terminal => {
                committed.push(tree.node(next).seed);
                root = next;
            }
            _ => break,
        }
    }

    let best = if best_seeds.is_empty() {
        None
    } else {
        let actions: Vec<_> = best_seeds
            .iter()
            .map(|&s| seed_to_action(s, variances))
            .collect();
        Some(replay(sim, &actions, reward_params)?.trajectory)
    };

    Ok(SearchResult {
        best,
        best_seeds,
        history,
        committed,
        simulations,
        tree,
    })
}

#[allow(clippy::too_many_arguments)]
fn simulate<S>(
    sim: &mut S,
    variances: &[f64],
    reward_params: &RewardParams,
    params: &DpwParams,
    meter: &mut StepMeter,
    rng: &mut ChaCha8Rng,
    tree: &mut SearchTree,
    root: usize,
    committed: &[u64],
    path: &mut Vec<usize>,
    rewards: &mut Vec<f64>,
    rollout_seeds: &mut Vec<u64>,
) -> Result<Simulation>
where
    S: Simulator + ?Sized,
{
    sim.initialize();
    let mut t = 0;
    let mut total = 0.0;
    let mut collision = false;
    let mut step = |sim: &mut S, seed: u64, meter: &mut StepMeter, t: &mut usize| -> Result<f64> {
        let out = sim.step(&seed_to_action(seed, variances))?;
        meter.record(&out);
        collision |= out.event;
        let r = reward(&out, reward_params, *t);
        *t += 1;
        Ok(r)
    };

    for &s in committed {
        total += step(sim, s, meter, &mut t)?;
    }

    let mut node = root;
    let mut tail = 0.0;
    loop {
        if sim.is_terminal() {
            break;
        }
        if tree.can_widen(node, params.k, params.alpha) {
            tree.add_child(node, rng.random());
        }
        let child = tree
            .select_child(node, params.exploration)
            .expect("widening guarantees at least one child");
        let r = step(sim, tree.node(child).seed, meter, &mut t)?;
        path.push(child);
        rewards.push(r);
        node = child;
        if tree.node(child).visits == 0 {
            tree.node_mut(child).terminal = sim.is_terminal();
            while !sim.is_terminal() {
                let s = rng.random();
                rollout_seeds.push(s);
                tail += step(sim, s, meter, &mut t)?;
            }
            break;
        }
    }

    tree.backpropagate(root, path, rewards, tail);
    total += rewards.iter().sum::<f64>() + tail;
    Ok(Simulation { total, collision })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{EnvAction, TransitionOutcome};

    /// One-dimensional walk; the event fires when the position passes 1.
    #[derive(Clone)]
    struct Walker {
        x: f64,
        t: usize,
        done: bool,
    }

    impl Walker {
        fn new() -> Self {
            Self { x: 0.0, t: 0, done: false }
        }
    }

    impl Simulator for Walker {
        fn initialize(&mut self) {
            *self = Self::new();
        }
        fn step(&mut self, a: &EnvAction) -> Result<TransitionOutcome> {
            let u = a.as_slice()[0];
            self.x += u;
            self.t += 1;
            let event = self.x >= 1.0;
            self.done = event || self.t >= 10;
            Ok(TransitionOutcome {
                mahalanobis: u.abs(),
                event,
                dist: (1.0 - self.x).max(0.0),
                terminal: self.done,
            })
        }
        fn is_terminal(&self) -> bool {
            self.done
        }
        fn observe(&self) -> Vec<f64> {
            vec![self.x]
        }
        fn action_dim(&self) -> usize {
            1
        }
        fn observation_dim(&self) -> usize {
            1
        }
        fn horizon(&self) -> usize {
            10
        }
        fn noise_free_mahalanobis(&self, a: &EnvAction) -> f64 {
            a.as_slice()[0].abs()
        }
    }

    fn params() -> DpwParams {
        DpwParams {
            iterations: 50,
            exploration: 1.0,
            seed: 3,
            ..DpwParams::default()
        }
    }

    fn rp() -> RewardParams {
        RewardParams {
            horizon: 10,
            ..RewardParams::default()
        }
    }

    #[test]
    fn finds_the_event() {
        let mut sim = Walker::new();
        let mut meter = StepMeter::new();
        let res = search(&mut sim, &[0.25], &rp(), &params(), &mut meter).unwrap();
        let best = res.best.unwrap();
        assert!(best.is_collision());
        assert!(meter.count_at_first_collision().is_some());
        assert_eq!(res.history.last().unwrap().reward, best.total_reward);
    }

    #[test]
    fn reproducible() {
        let run = || {
            let mut sim = Walker::new();
            let mut meter = StepMeter::new();
            let r = search(&mut sim, &[0.25], &rp(), &params(), &mut meter).unwrap();
            (r.best_seeds, r.committed, meter)
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn respects_budget() {
        let mut sim = Walker::new();
        let mut meter = StepMeter::new();
        let p = DpwParams {
            max_steps: Some(35),
            ..params()
        };
        let res = search(&mut sim, &[0.25], &rp(), &p, &mut meter).unwrap();
        // Stops before the first simulation that would start past the cap.
        assert!(meter.count() < 35 + 10);
        assert!(res.simulations >= 3);
    }

    #[test]
    fn zero_budget_yields_nothing() {
        let mut sim = Walker::new();
        let mut meter = StepMeter::new();
        let p = DpwParams {
            max_steps: Some(0),
            ..params()
        };
        let res = search(&mut sim, &[0.25], &rp(), &p, &mut meter).unwrap();
        assert!(res.best.is_none());
        assert_eq!(meter.count(), 0);
    }

    #[test]
    fn visit_invariant_and_widening_bound() {
        let mut sim = Walker::new();
        let mut meter = StepMeter::new();
        let p = DpwParams {
            iterations: 200,
            ..params()
        };
        let res = search(&mut sim, &[4.0e-4], &rp(), &p, &mut meter).unwrap();
        // Ancestors of the committed root stop receiving updates once search
        // moves below them, so only the live subtree is checked.
        let live = res.committed.len();
        for node in res.tree.nodes().iter().filter(|n| n.depth >= live) {
            if node.visits == 0 {
                continue;
            }
            let child_sum: u32 = node.children.iter().map(|&c| res.tree.node(c).visits).sum();
            if node.terminal {
                assert!(node.children.is_empty());
            } else if node.depth > live {
                assert_eq!(node.visits, child_sum + 1);
            } else {
                assert!(child_sum < node.visits);
            }
            let bound = p.k * (node.visits as f64).powf(p.alpha) + 1.0;
            assert!(node.children.len() as f64 <= bound);
        }
    }

    #[test]
    fn best_replays_exactly() {
        let mut sim = Walker::new();
        let mut meter = StepMeter::new();
        let res = search(&mut sim, &[0.01], &rp(), &params(), &mut meter).unwrap();
        let best = res.best.unwrap();
        let again = replay(&mut sim, &best.actions, &rp()).unwrap().trajectory;
        assert_eq!(again, best);
        assert_eq!(best.total_reward, res.history.last().unwrap().reward);
    }
}
