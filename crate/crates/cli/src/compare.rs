use crate::error::{CliError, Result};
use crate::run::{RunOutcome, RunSummary};

const HEADER: [&str; 8] = [
    "scenario",
    "solver",
    "seed",
    "calls_to_step",
    "calls_at_first_collision",
    "reward",
    "reward_without_noise",
    "outcome",
];

fn cells(s: &RunSummary) -> [String; 8] {
    let opt_f = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.2}"));
    [
        s.scenario.clone(),
        s.solver.to_string(),
        s.seed.to_string(),
        s.calls_to_step.to_string(),
        s.calls_at_first_collision.map_or("-".to_string(), |c| c.to_string()),
        opt_f(s.best_reward),
        opt_f(s.reward_without_noise),
        match s.outcome {
            RunOutcome::Collision => "collision".to_string(),
            RunOutcome::HorizonMiss => "horizon_miss".to_string(),
        },
    ]
}

fn check(summaries: &[RunSummary]) -> Result<()> {
    if summaries.len() < 2 {
        return Err(CliError::Usage(format!(
            "compare needs at least two summaries, got {}",
            summaries.len()
        )));
    }
    Ok(())
}

/// Column-aligned text table, one row per summary.
pub fn compare_table(summaries: &[RunSummary]) -> Result<String> {
    check(summaries)?;
    let rows: Vec<[String; 8]> = summaries.iter().map(cells).collect();
    let mut widths = HEADER.map(str::len);
    for row in &rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let mut line = |cols: Vec<&str>| {
        let padded: Vec<String> = cols
            .iter()
            .zip(widths)
            .enumerate()
            .map(|(i, (c, w))| if i < 2 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        out.push_str(padded.join("  ").trim_end());
        out.push('\n');
    };
    line(HEADER.to_vec());
    for row in &rows {
        line(row.iter().map(String::as_str).collect());
    }
    Ok(out)
}

/// The same table as CSV.
pub fn compare_csv(summaries: &[RunSummary]) -> Result<String> {
    check(summaries)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER)?;
    for s in summaries {
        w.write_record(cells(s))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
