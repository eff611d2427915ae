use std::path::Path;

use ast_stress::ast::RewardParams;
use ast_stress::drl::DrlParams;
use ast_stress::mcts::DpwParams;
use ast_stress::sim::ScenarioConfig;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Mcts,
    Drl,
}

impl std::fmt::Display for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Solver::Mcts => "mcts",
            Solver::Drl => "drl",
        })
    }
}

/// Everything that determines a run, after flags and overrides are applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Preset id or the path the scenario was loaded from.
    pub scenario_name: String,
    pub solver: Solver,
    pub seed: u64,
    pub budget: u64,
    pub scenario: ScenarioConfig,
    pub reward: RewardParams,
    pub mcts: DpwParams,
    pub drl: DrlParams,
}

/// Command-line choices that feed [`RunConfig::build`].
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub scenario: String,
    pub solver: Option<Solver>,
    pub seed: u64,
    pub budget: Option<u64>,
    pub horizon: Option<usize>,
    pub iterations: Option<usize>,
    /// `dotted.path=value` assignments, applied last.
    pub overrides: Vec<String>,
}

pub const DEFAULT_BUDGET: u64 = 2_000_000;

fn load_scenario(spec: &str) -> Result<ScenarioConfig> {
    match spec.parse::<u32>() {
        Ok(id) => Ok(ScenarioConfig::preset(id)?),
        Err(_) => {
            let path = Path::new(spec);
            if !path.exists() {
                return Err(CliError::Usage(format!(
                    "scenario `{spec}` is neither a preset id (1, 2, 3) nor an existing file"
                )));
            }
            Ok(ScenarioConfig::load(path)?)
        }
    }
}

impl RunConfig {
    pub fn build(opts: &RunOptions) -> Result<Self> {
        let solver = opts.solver.unwrap_or(Solver::Mcts);
        let mut cfg = RunConfig {
            scenario_name: opts.scenario.clone(),
            solver,
            seed: opts.seed,
            budget: opts.budget.unwrap_or(DEFAULT_BUDGET),
            scenario: load_scenario(&opts.scenario)?,
            reward: RewardParams::default(),
            mcts: DpwParams::default(),
            drl: DrlParams::default(),
        };
        if let Some(h) = opts.horizon {
            cfg.scenario.horizon = h;
        }
        if let Some(n) = opts.iterations {
            match solver {
                Solver::Mcts => cfg.mcts.iterations = n,
                Solver::Drl => cfg.drl.iterations = n,
            }
        }
        if !opts.overrides.is_empty() {
            let mut value = serde_json::to_value(&cfg)?;
            for o in &opts.overrides {
                apply_override(&mut value, o)?;
            }
            cfg = serde_json::from_value(value)
                .map_err(|e| CliError::Override(opts.overrides.join(" "), e.to_string()))?;
        }
        cfg.sync();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Propagates the shared knobs into the solver and reward sections.
    fn sync(&mut self) {
        self.reward.horizon = self.scenario.horizon;
        self.mcts.seed = self.seed;
        self.drl.seed = self.seed;
        self.mcts.max_steps = Some(self.budget);
        self.drl.max_steps = Some(self.budget);
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(CliError::Usage("budget must be positive".into()));
        }
        self.scenario.validate()?;
        self.reward.validate()?;
        match self.solver {
            Solver::Mcts => self.mcts.validate()?,
            Solver::Drl => self.drl.validate()?,
        }
        Ok(())
    }
}

/// Sets `path=value` inside `root`. Path segments are object keys or array
/// indices; the value is parsed as JSON, falling back to a plain string. The
/// target must already exist, so typos are reported instead of ignored.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<()> {
    let bad = |m: &str| CliError::Override(assignment.to_string(), m.to_string());
    let (path, raw) = assignment.split_once('=').ok_or_else(|| bad("expected path=value"))?;
    let path = path.trim();
    if path.is_empty() {
        return Err(bad("empty path"));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let mut node = root;
    for seg in path.split('.') {
        node = match node {
            Value::Object(map) => map.get_mut(seg).ok_or_else(|| bad(&format!("no field `{seg}`")))?,
            Value::Array(items) => {
                let i: usize = seg.parse().map_err(|_| bad(&format!("`{seg}` is not an index")))?;
                items.get_mut(i).ok_or_else(|| bad(&format!("index {i} out of range")))?
            }
            _ => return Err(bad(&format!("cannot descend into `{seg}`"))),
        };
    }
    *node = value;
    Ok(())
}
