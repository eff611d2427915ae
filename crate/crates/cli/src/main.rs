use std::path::PathBuf;
use std::process::ExitCode;

use ast_cli::{compare_csv, compare_table, exit_code, run, RunConfig, RunOptions, RunSummary, Solver};
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "ast-crosswalk", version)]
#[command(about = "Searches for likely pedestrian collisions with an IDM-driven vehicle at a crosswalk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one solver on one scenario and write its artifacts.
    Run {
        /// Preset id (1, 2, 3) or a scenario JSON file.
        #[arg(long, default_value = "1")]
        scenario: String,
        #[arg(long, value_enum, default_value_t = Solver::Mcts)]
        solver: Solver,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Step-call budget.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        horizon: Option<usize>,
        /// MCTS: simulations per committed step. DRL: training iterations.
        #[arg(long)]
        iterations: Option<usize>,
        /// Override any config value, e.g. `--set scenario.idm.b_max=4`.
        #[arg(long = "set", value_name = "PATH=VALUE")]
        overrides: Vec<String>,
    },
    /// Tabulate two or more summary.json files.
    Compare {
        summaries: Vec<PathBuf>,
        #[arg(long)]
        csv: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            scenario,
            solver,
            seed,
            budget,
            out,
            horizon,
            iterations,
            overrides,
        } => {
            let opts = RunOptions {
                scenario,
                solver: Some(solver),
                seed,
                budget,
                horizon,
                iterations,
                overrides,
            };
            let cfg = match RunConfig::build(&opts) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            match run(&cfg, &out) {
                Ok(report) => {
                    let s = &report.summary;
                    println!(
                        "scenario {} solver {} seed {}: {:?}, best reward {}, without noise {}, {} step calls (first collision at {}), {:.2} s",
                        s.scenario,
                        s.solver,
                        s.seed,
                        s.outcome,
                        s.best_reward.map_or("-".into(), |r| format!("{r:.3}")),
                        s.reward_without_noise.map_or("-".into(), |r| format!("{r:.3}")),
                        s.calls_to_step,
                        s.calls_at_first_collision.map_or("-".into(), |c| c.to_string()),
                        report.wall_clock_seconds,
                    );
                    for f in &report.files {
                        println!("wrote {}", f.display());
                    }
                    ExitCode::from(exit_code(s) as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Compare { summaries, csv } => {
            let loaded: Result<Vec<RunSummary>, _> = summaries.iter().map(|p| RunSummary::load(p)).collect();
            let table = loaded.and_then(|s| if csv { compare_csv(&s) } else { compare_table(&s) });
            match table {
                Ok(t) => {
                    print!("{t}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
