use std::fmt::Write as _;
use std::fs::File;
use std::path::Path;

use ast_stress::ast::{reward, EnvAction, RewardParams, Simulator, Trajectory};
use ast_stress::drl::CurvePoint;
use ast_stress::sim::{CrosswalkSim, SimulatorState};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, CliError, Result};

/// One row of the trajectory CSV: a pedestrian after step `t`, the action
/// components that drove it, and the vehicle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: usize,
    pub ped_id: usize,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub ax: f64,
    pub ay: f64,
    pub eps_x: f64,
    pub eps_y: f64,
    pub eps_vx: f64,
    pub eps_vy: f64,
    pub veh_x: f64,
    pub veh_v: f64,
    pub reward: f64,
}

/// Re-simulates `actions` and returns the state after every step, with the
/// per-step rewards.
pub fn replay_states(
    sim: &mut CrosswalkSim,
    actions: &[EnvAction],
    params: &RewardParams,
) -> Result<Vec<(SimulatorState, f64)>> {
    sim.initialize();
    let mut out = Vec::with_capacity(actions.len());
    for (t, a) in actions.iter().enumerate() {
        if sim.is_terminal() {
            break;
        }
        let o = sim.step(a)?;
        out.push((sim.state().clone(), reward(&o, params, t)));
    }
    Ok(out)
}

pub fn trajectory_rows(sim: &mut CrosswalkSim, traj: &Trajectory, params: &RewardParams) -> Result<Vec<TrajectoryRow>> {
    let states = replay_states(sim, &traj.actions, params)?;
    let mut rows = Vec::with_capacity(states.len() * sim.config().pedestrian_count());
    for (t, ((state, r), action)) in states.iter().zip(&traj.actions).enumerate() {
        for (i, (p, a)) in state.pedestrians.iter().zip(action.as_slice().chunks_exact(6)).enumerate() {
            rows.push(TrajectoryRow {
                t,
                ped_id: i,
                x: p.x,
                y: p.y,
                vx: p.vx,
                vy: p.vy,
                ax: a[0],
                ay: a[1],
                eps_vx: a[2],
                eps_vy: a[3],
                eps_x: a[4],
                eps_y: a[5],
                veh_x: state.vehicle.x,
                veh_v: state.vehicle.v,
                reward: *r,
            });
        }
    }
    Ok(rows)
}

pub fn write_trajectory_csv(path: &Path, rows: &[TrajectoryRow]) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(file);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

pub fn read_trajectory_csv(path: &Path) -> Result<Vec<TrajectoryRow>> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut r = csv::Reader::from_reader(file);
    r.deserialize().map(|row| row.map_err(CliError::from)).collect()
}

/// Rebuilds the per-step environment actions from trajectory rows.
pub fn actions_from_rows(rows: &[TrajectoryRow], pedestrians: usize) -> Result<Vec<EnvAction>> {
    let steps = rows.iter().map(|r| r.t + 1).max().unwrap_or(0);
    let mut values = vec![vec![f64::NAN; 6 * pedestrians]; steps];
    for r in rows {
        if r.ped_id >= pedestrians {
            return Err(CliError::Usage(format!("row for pedestrian {} but the scenario has {pedestrians}", r.ped_id)));
        }
        let block = &mut values[r.t][6 * r.ped_id..6 * r.ped_id + 6];
        block.copy_from_slice(&[r.ax, r.ay, r.eps_vx, r.eps_vy, r.eps_x, r.eps_y]);
    }
    values
        .into_iter()
        .map(|v| EnvAction::new(v).map_err(|_| CliError::Usage("trajectory CSV is missing rows".into())))
        .collect()
}

pub fn write_learning_curve(path: &Path, curve: &[CurvePoint]) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["iteration", "mean_return", "best_collision_reward", "cumulative_step_calls"])?;
    for c in curve {
        w.write_record([
            c.iteration.to_string(),
            c.mean_return.to_string(),
            c.best_collision_reward.map(|r| r.to_string()).unwrap_or_default(),
            c.cumulative_step_calls.to_string(),
        ])?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

const PALETTE: [&str; 4] = ["#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"];

/// Top-down plot of the road, the pedestrians' paths and the vehicle, with
/// start markers and a collision marker.
pub fn render_svg(sim: &CrosswalkSim, states: &[SimulatorState], collided: bool) -> String {
    let cfg = sim.config();
    let road = cfg.road;
    let initial = SimulatorState::initial(cfg);

    let mut xs: Vec<f64> = vec![initial.vehicle.x - initial.vehicle.length, road.crosswalk_half_width + 5.0];
    let mut ys: Vec<f64> = vec![road.road_y_min - 1.0, road.road_y_max + 1.0];
    for s in std::iter::once(&initial).chain(states) {
        xs.push(s.vehicle.x);
        for p in &s.pedestrians {
            xs.push(p.x);
            ys.push(p.y);
        }
    }
    let (x_min, x_max) = bounds(&xs, 2.0);
    let (y_min, y_max) = bounds(&ys, 1.0);
    let scale = 900.0 / (x_max - x_min);
    let width = 900.0;
    let height = ((y_max - y_min) * scale).max(120.0);
    let px = |x: f64| (x - x_min) * scale;
    let py = |y: f64| height - (y - y_min) * scale;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(
        svg,
        r##"<rect x="0" y="{:.2}" width="{width:.0}" height="{:.2}" fill="#d9d9d9"/>"##,
        py(road.road_y_max),
        (road.road_y_max - road.road_y_min) * scale
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#f5f5dc" stroke="#999999"/>"##,
        px(-road.crosswalk_half_width),
        py(road.road_y_max),
        2.0 * road.crosswalk_half_width * scale,
        (road.road_y_max - road.road_y_min) * scale
    );

    let veh_path: Vec<String> = std::iter::once(&initial)
        .chain(states)
        .map(|s| format!("{:.2},{:.2}", px(s.vehicle.x), py(s.vehicle.y)))
        .collect();
    let _ = writeln!(
        svg,
        r##"<polyline points="{}" fill="none" stroke="#444444" stroke-dasharray="4 3"/>"##,
        veh_path.join(" ")
    );
    let last = states.last().unwrap_or(&initial);
    let v = &last.vehicle;
    let _ = writeln!(
        svg,
        r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444444" stroke-width="2"/>"##,
        px(v.x - v.length / 2.0),
        py(v.y + v.width / 2.0),
        v.length * scale,
        v.width * scale
    );

    for (i, p0) in initial.pedestrians.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = std::iter::once(p0)
            .chain(states.iter().map(|s| &s.pedestrians[i]))
            .map(|p| format!("{:.2},{:.2}", px(p.x), py(p.y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="2"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="5" fill="{colour}"/>"#,
            px(p0.x),
            py(p0.y)
        );
    }

    if collided {
        let hit = last
            .pedestrians
            .iter()
            .min_by(|a, b| v.distance_to(a).total_cmp(&v.distance_to(b)))
            .expect("scenarios have at least one pedestrian");
        let (cx, cy) = (px(hit.x), py(hit.y));
        let _ = writeln!(
            svg,
            r##"<path d="M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}" stroke="#d62728" stroke-width="3"/>"##,
            cx - 7.0,
            cy - 7.0,
            cx + 7.0,
            cy + 7.0,
            cx - 7.0,
            cy + 7.0,
            cx + 7.0,
            cy - 7.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(values: &[f64], pad: f64) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo - pad, hi + pad)
}
