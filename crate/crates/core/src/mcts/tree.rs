use serde::{Deserialize, Serialize};

/// A search-tree node: the state reached by the seed history from the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    /// Seed of the action that leads here from the parent (unused at the root).
    pub seed: u64,
    pub parent: Option<usize>,
    /// Number of simulations that passed through this node. Equals `N(s, a)`
    /// for the edge into it.
    pub visits: u32,
    /// Mean return from the edge into this node onward, `Q(s, a)`.
    pub q: f64,
    pub children: Vec<usize>,
    /// Whether the state was terminal when first reached.
    pub terminal: bool,
    pub depth: usize,
}

/// Arena-backed search tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchTree {
    nodes: Vec<Node>,
}

impl Default for SearchTree {
    fn default() -> Self {
        Self::new()
    }
}

impl SearchTree {
    pub const ROOT: usize = 0;

    /// A tree holding only the root, with its initial visit counted.
    pub fn new() -> Self {
        Self {
            nodes: vec![Node {
                seed: 0,
                parent: None,
                visits: 1,
                q: 0.0,
                children: Vec::new(),
                terminal: false,
                depth: 0,
            }],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub(crate) fn node_mut(&mut self, i: usize) -> &mut Node {
        &mut self.nodes[i]
    }

    /// Seed history from the root to node `i`.
    pub fn history(&self, mut i: usize) -> Vec<u64> {
        let mut seeds = Vec::with_capacity(self.nodes[i].depth);
        while let Some(p) = self.nodes[i].parent {
            seeds.push(self.nodes[i].seed);
            i = p;
        }
        seeds.reverse();
        seeds
    }

    /// Progressive widening test: may node `i` receive another child?
    pub fn can_widen(&self, i: usize, k: f64, alpha: f64) -> bool {
        let n = &self.nodes[i];
        (n.children.len() as f64) <= k * (n.visits as f64).powf(alpha)
    }

    pub fn add_child(&mut self, i: usize, seed: u64) -> usize {
        let id = self.nodes.len();
        let depth = self.nodes[i].depth + 1;
        self.nodes.push(Node {
            seed,
            parent: Some(i),
            visits: 0,
            q: 0.0,
            children: Vec::new(),
            terminal: false,
            depth,
        });
        self.nodes[i].children.push(id);
        id
    }

    /// UCT selection. Unvisited children are taken first, in insertion order;
    /// ties go to the earliest child.
    pub fn select_child(&self, i: usize, exploration: f64) -> Option<usize> {
        let node = &self.nodes[i];
        if let Some(&fresh) = node.children.iter().find(|&&c| self.nodes[c].visits == 0) {
            return Some(fresh);
        }
        let ln_n = (node.visits.max(1) as f64).ln();
        let mut best: Option<(usize, f64)> = None;
        for &c in &node.children {
            let child = &self.nodes[c];
            let score = child.q + exploration * (ln_n / child.visits as f64).sqrt();
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((c, score));
            }
        }
        best.map(|(c, _)| c)
    }

    /// Visited child with the highest `Q`.
    pub fn best_child(&self, i: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for &c in &self.nodes[i].children {
            let child = &self.nodes[c];
            if child.visits > 0 && best.is_none_or(|(_, q)| child.q > q) {
                best = Some((c, child.q));
            }
        }
        best.map(|(c, _)| c)
    }

    /// Updates visit counts and incremental-mean `Q` values along `path`.
    ///
    /// `path` lists the nodes entered below `from`, `rewards[d]` is the reward
    /// of the step into `path[d]`, and `tail` is the return collected after the
    /// last node (e.g. by a rollout). Returns are undiscounted.
    pub fn backpropagate(&mut self, from: usize, path: &[usize], rewards: &[f64], tail: f64) {
        debug_assert_eq!(path.len(), rewards.len());
        self.nodes[from].visits += 1;
        let mut ret = tail;
        for (&n, &r) in path.iter().zip(rewards).rev() {
            ret += r;
            let node = &mut self.nodes[n];
            node.visits += 1;
            node.q += (ret - node.q) / node.visits as f64;
        }
    }
}
