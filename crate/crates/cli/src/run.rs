use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ast_stress::ast::{reward_without_noise, StepMeter, Trajectory};
use ast_stress::drl::train;
use ast_stress::mcts::search;
use ast_stress::sim::CrosswalkSim;
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, Solver};
use crate::error::{io_err, Result};
use crate::output::{render_svg, replay_states, trajectory_rows, write_learning_curve, write_trajectory_csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunOutcome {
    Collision,
    HorizonMiss,
}

/// Calls-to-step and reward figures of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub solver: Solver,
    pub seed: u64,
    pub budget: u64,
    pub calls_to_step: u64,
    pub calls_at_first_collision: Option<u64>,
    pub best_reward: Option<f64>,
    pub reward_without_noise: Option<f64>,
    pub trajectory_steps: usize,
    pub outcome: RunOutcome,
}

impl RunSummary {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub summary: RunSummary,
    pub wall_clock_seconds: f64,
    pub files: Vec<PathBuf>,
}

/// Runs the configured solver and writes `config.json`, `summary.json`,
/// `trajectory.csv`, `paths.svg` and, for DRL, `learning_curve.csv` into
/// `out_dir`.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<RunReport> {
    cfg.validate()?;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let start = Instant::now();
    let mut sim = CrosswalkSim::new(cfg.scenario.clone())?;
    let mut meter = StepMeter::new();
    let mut files = Vec::new();

    let best: Option<Trajectory> = match cfg.solver {
        Solver::Mcts => {
            let variances = sim.variances().to_vec();
            search(&mut sim, &variances, &cfg.reward, &cfg.mcts, &mut meter)?.best
        }
        Solver::Drl => {
            let res = train(&mut sim, &cfg.reward, &cfg.drl, &mut meter)?;
            let path = out_dir.join("learning_curve.csv");
            write_learning_curve(&path, &res.curve)?;
            files.push(path);
            res.best
        }
    };
    let wall_clock_seconds = start.elapsed().as_secs_f64();

    let quiet = match &best {
        Some(t) => Some(reward_without_noise(&mut sim, &t.actions, &cfg.reward)?),
        None => None,
    };
    let collided = best.as_ref().is_some_and(|t| t.is_collision());
    let summary = RunSummary {
        scenario: cfg.scenario_name.clone(),
        solver: cfg.solver,
        seed: cfg.seed,
        budget: cfg.budget,
        calls_to_step: meter.count(),
        calls_at_first_collision: meter.count_at_first_collision(),
        best_reward: best.as_ref().map(|t| t.total_reward),
        reward_without_noise: quiet,
        trajectory_steps: best.as_ref().map_or(0, |t| t.len()),
        outcome: if collided { RunOutcome::Collision } else { RunOutcome::HorizonMiss },
    };

    let write = |name: &str, text: String, files: &mut Vec<PathBuf>| -> Result<()> {
        let path = out_dir.join(name);
        fs::write(&path, text).map_err(io_err(&path))?;
        files.push(path);
        Ok(())
    };
    write("config.json", serde_json::to_string_pretty(cfg)? + "\n", &mut files)?;
    write("summary.json", serde_json::to_string_pretty(&summary)? + "\n", &mut files)?;

    let states = match &best {
        Some(t) => {
            let rows = trajectory_rows(&mut sim, t, &cfg.reward)?;
            let path = out_dir.join("trajectory.csv");
            write_trajectory_csv(&path, &rows)?;
            files.push(path);
            replay_states(&mut sim, &t.actions, &cfg.reward)?
                .into_iter()
                .map(|(s, _)| s)
                .collect()
        }
        None => Vec::new(),
    };
    write("paths.svg", render_svg(&sim, &states, collided), &mut files)?;

    Ok(RunReport {
        summary,
        wall_clock_seconds,
        files,
    })
}
