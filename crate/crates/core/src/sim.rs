//! Episode runner, supervision records and benchmark metrics.
//!
//! One episode drives the receding-horizon loop: solve a plan on the
//! configured cost map, optionally perturb the chosen waypoint with
//! truncated Gaussian noise (standing in for a learned predictor's
//! error) and refit the spline, track it with the LQR controller for one
//! replan period, and terminate on goal entry, collision, timeout or
//! planning failure. Every replan emits a supervision record: an
//! egocentric occupancy crop, the current speeds, and the unperturbed
//! waypoint label in the robot frame.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float as _;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::{
    distance_transform, heuristic_cost, reachability_cost, CostError, CostKind, CostMap,
    DistanceKind,
};
use crate::dynamics::{step, ControlInput, Disturbance, DynamicsBounds, VehicleState};
use crate::grid::Grid4D;
use crate::map::OccupancyMap;
use crate::planner::{fit_spline, plan, PlannerConfig, Waypoint};
use crate::solver::{grid_for_map, solve_ttc, solve_ttr, GoalSpec, GridSpec, SolveConfig, SolveError};
use crate::tracker::{gains_for_trajectory, track_step, LqrWeights};

/// Egocentric crop geometry: a square window of side `size_m` directly
/// ahead of the robot, rasterized to `pixels` × `pixels` booleans.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CropSpec {
    pub size_m: f64,
    pub pixels: usize,
}

impl Default for CropSpec {
    fn default() -> Self {
        CropSpec { size_m: 4.5, pixels: 64 }
    }
}

/// Boolean occupancy patch in the robot frame; row 0 is the leftmost
/// lateral band, column 0 the nearest forward band, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyCrop {
    pub pixels: usize,
    pub size_m: f64,
    pub cells: Vec<bool>,
}

/// Rasterizes the map around `state`: window x ∈ [0, size] ahead,
/// y ∈ [−size/2, size/2] lateral; off-map pixels count as occupied.
pub fn egocentric_crop(map: &OccupancyMap, state: &VehicleState, spec: &CropSpec) -> OccupancyCrop {
    let n = spec.pixels;
    let px = spec.size_m / n as f64;
    let (s, c) = state.phi.sin_cos();
    let mut cells = vec![false; n * n];
    for row in 0..n {
        let ye = spec.size_m * 0.5 - (row as f64 + 0.5) * px;
        for col in 0..n {
            let xe = (col as f64 + 0.5) * px;
            let wx = state.x + xe * c - ye * s;
            let wy = state.y + xe * s + ye * c;
            cells[row * n + col] = map.occupied_at_world(wx, wy);
        }
    }
    OccupancyCrop { pixels: n, size_m: spec.size_m, cells }
}

/// How one episode ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Collision,
    Timeout,
    PlanFailure,
}

/// Episode parameters. With `noise_xy`/`noise_theta` above zero the
/// chosen waypoint is perturbed by zero-mean Gaussian noise truncated at
/// 3σ (resampled, so the perturbation never leaves the envelope) before
/// the executed spline is refit. `rollout_disturbance_scale` optionally
/// applies seeded random dynamics disturbances during tracking, scaled
/// relative to the disturbance bounds; the default of zero matches the
/// reading that disturbances model prediction error, not physical wind.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpisodeConfig {
    pub start: VehicleState,
    pub goal: GoalSpec,
    pub replan_hz: f64,
    pub timeout: f64,
    pub cost_kind: CostKind,
    /// Disturbance bounds active in the value computation.
    pub disturbance_mode: bool,
    pub noise_xy: f64,
    pub noise_theta: f64,
    pub rollout_disturbance_scale: f64,
    pub seed: u64,
    pub crop: CropSpec,
}

impl EpisodeConfig {
    pub fn new(start: VehicleState, goal: GoalSpec) -> Self {
        EpisodeConfig {
            start,
            goal,
            replan_hz: 4.0,
            timeout: 60.0,
            cost_kind: CostKind::Reachability,
            disturbance_mode: true,
            noise_xy: 0.0,
            noise_theta: 0.0,
            rollout_disturbance_scale: 0.0,
            seed: 0,
            crop: CropSpec::default(),
        }
    }
}

/// One sample of the executed trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    pub state: VehicleState,
    pub control: ControlInput,
}

/// Waypoint bookkeeping for one replan step (world frame).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaypointRecord {
    pub t: f64,
    pub planned: Waypoint,
    /// Equals `planned` when no noise is configured.
    pub executed: Waypoint,
}

/// One supervision sample: perception proxy, current speeds, and the
/// expert waypoint label in the robot frame.
#[derive(Clone, Debug, PartialEq)]
pub struct SupervisionRecord {
    pub crop: OccupancyCrop,
    pub v: f64,
    pub omega: f64,
    pub label: Waypoint,
}

/// Full episode output.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeResult {
    pub outcome: Outcome,
    /// Simulated seconds until termination.
    pub time: f64,
    pub trace: Vec<TracePoint>,
    /// Minimum obstacle clearance along the trace (m).
    pub d_min: f64,
    pub waypoints: Vec<WaypointRecord>,
    pub records: Vec<SupervisionRecord>,
    pub replans: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    Solve(SolveError),
    Cost(CostError),
    BadConfig(&'static str),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Solve(e) => write!(f, "value solve failed: {e}"),
            SimError::Cost(e) => write!(f, "cost construction failed: {e}"),
            SimError::BadConfig(why) => write!(f, "bad episode config: {why}"),
        }
    }
}

impl From<SolveError> for SimError {
    fn from(e: SolveError) -> Self {
        SimError::Solve(e)
    }
}

impl From<CostError> for SimError {
    fn from(e: CostError) -> Self {
        SimError::Cost(e)
    }
}

/// Cost-map scale factors: α for the reachability combination, λ₁/λ₂
/// for the heuristic baseline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostConfig {
    pub alpha: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl Default for CostConfig {
    fn default() -> Self {
        CostConfig { alpha: 30.0, lambda1: 0.3, lambda2: 1.0 }
    }
}

/// Builds the grid covering `map` and the cost map of the requested
/// kind. Reachability solves both value PDEs (with or without the
/// disturbance bounds); the heuristic needs only distance transforms.
pub fn prepare_cost_map(
    map: &OccupancyMap,
    goal: &GoalSpec,
    bounds: &DynamicsBounds,
    grid_spec: &GridSpec,
    solve_cfg: &SolveConfig,
    cost_cfg: &CostConfig,
    kind: CostKind,
    disturbance_mode: bool,
) -> Result<CostMap, SimError> {
    match kind {
        CostKind::Reachability => {
            let grid = grid_for_map(map, grid_spec, bounds.v_max).map_err(SolveError::Grid)?;
            let b = if disturbance_mode { *bounds } else { bounds.without_disturbance() };
            let ttr = solve_ttr(&grid, &b, goal, map, solve_cfg)?;
            let ttc = solve_ttc(&grid, &b, map, solve_cfg)?;
            Ok(reachability_cost(&ttr.field, &ttc.field, cost_cfg.alpha, solve_cfg.ttc_cap)?)
        }
        CostKind::Heuristic => {
            let d_obs = distance_transform(map, DistanceKind::ObstacleDist, None)?;
            let d_goal = distance_transform(map, DistanceKind::GoalDist, Some(goal))?;
            Ok(heuristic_cost(&d_obs, &d_goal, cost_cfg.lambda1, cost_cfg.lambda2)?)
        }
    }
}

/// Convenience: the grid a reachability solve would use for this map.
pub fn episode_grid(map: &OccupancyMap, grid_spec: &GridSpec, bounds: &DynamicsBounds) -> Result<Grid4D, SimError> {
    Ok(grid_for_map(map, grid_spec, bounds.v_max).map_err(SolveError::Grid)?)
}

/// Gaussian with |draw| ≤ 3σ by resampling.
fn truncated_gauss(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    if sigma <= 0.0 {
        return 0.0;
    }
    loop {
        // Box-Muller from two uniform draws
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        let z = (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos();
        if z.abs() <= 3.0 {
            return sigma * z;
        }
    }
}

fn rollout_disturbance(rng: &mut ChaCha8Rng, bounds: &DynamicsBounds, scale: f64) -> Disturbance {
    if scale <= 0.0 {
        return Disturbance::ZERO;
    }
    // uniform direction, uniform-in-area radius inside the scaled disk
    let angle = rng.gen_range(0.0..2.0 * core::f64::consts::PI);
    let radius = scale * bounds.dxy_max * rng.gen_range(0.0f64..1.0).sqrt();
    Disturbance {
        dx: radius * angle.cos(),
        dy: radius * angle.sin(),
        dphi: rng.gen_range(-1.0..1.0) * scale * bounds.dphi_max,
    }
}

/// Runs one episode of the receding-horizon expert on a prepared cost
/// map. Deterministic: identical inputs and seed give an identical
/// result, bit for bit.
pub fn run_episode(
    map: &OccupancyMap,
    cost_map: &CostMap,
    cfg: &EpisodeConfig,
    bounds: &DynamicsBounds,
    planner_cfg: &PlannerConfig,
    weights: &LqrWeights,
) -> EpisodeResult {
    let d_obs = distance_transform(map, DistanceKind::ObstacleDist, None)
        .expect("obstacle transform cannot fail");
    let clearance =
        |z: &VehicleState| d_obs.field.sample(z.x, z.y, f64::INFINITY);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut z = cfg.start;
    let mut tick = 0u64;
    let mut t = 0.0f64;
    let mut last_control = ControlInput::ZERO;
    let mut trace = vec![TracePoint { t, state: z, control: last_control }];
    let mut d_min = clearance(&z);
    let mut waypoints = Vec::new();
    let mut records = Vec::new();
    let mut replans = 0usize;

    let mut finish = |outcome: Outcome,
                      t: f64,
                      trace: Vec<TracePoint>,
                      d_min: f64,
                      waypoints: Vec<WaypointRecord>,
                      records: Vec<SupervisionRecord>,
                      replans: usize| EpisodeResult {
        outcome,
        time: t,
        trace,
        d_min,
        waypoints,
        records,
        replans,
    };

    // the termination check precedes planning: starting inside the goal
    // succeeds at time zero
    if cfg.goal.contains(z.x, z.y) {
        return finish(Outcome::Success, 0.0, trace, d_min, waypoints, records, 0);
    }

    let dt = planner_cfg.dt;
    let steps_per_replan = ((1.0 / (cfg.replan_hz * dt)).round() as usize).max(1);

    loop {
        let (planned_wp, planned_traj) = match plan(&z, cost_map, planner_cfg, bounds) {
            Ok(p) => p,
            Err(_) => {
                return finish(Outcome::PlanFailure, t, trace, d_min, waypoints, records, replans)
            }
        };
        replans += 1;

        records.push(SupervisionRecord {
            crop: egocentric_crop(map, &z, &cfg.crop),
            v: z.v,
            omega: last_control.omega,
            label: planned_wp.to_egocentric(&z),
        });

        // model the perception error: perturb the waypoint and execute
        // the spline to the perturbed pose instead
        let mut executed_wp = planned_wp;
        let mut traj = planned_traj;
        if cfg.noise_xy > 0.0 || cfg.noise_theta > 0.0 {
            executed_wp = Waypoint::world(
                planned_wp.x + truncated_gauss(&mut rng, cfg.noise_xy),
                planned_wp.y + truncated_gauss(&mut rng, cfg.noise_xy),
                planned_wp.theta + truncated_gauss(&mut rng, cfg.noise_theta),
            );
            let dist = (executed_wp.x - z.x).hypot(executed_wp.y - z.y);
            let terminal_speed =
                planner_cfg.terminal_speed.speed(z.v, dist, planner_cfg.horizon, bounds);
            // the executed trajectory is whatever the tracker can chase;
            // an unfittable perturbation falls back to the expert plan
            if let Ok(perturbed) =
                fit_spline(&z, &executed_wp, planner_cfg.horizon, dt, terminal_speed)
            {
                traj = perturbed;
            } else {
                executed_wp = planned_wp;
            }
        }
        waypoints.push(WaypointRecord { t, planned: planned_wp, executed: executed_wp });

        let gains = match gains_for_trajectory(&traj, weights) {
            Ok(g) => g,
            Err(_) => {
                return finish(Outcome::PlanFailure, t, trace, d_min, waypoints, records, replans)
            }
        };

        for i in 0..steps_per_replan.min(gains.feedback.len()) {
            let u = track_step(&z, &traj.states[i], &gains.feedforward[i], &gains.feedback[i], bounds);
            let d = rollout_disturbance(&mut rng, bounds, cfg.rollout_disturbance_scale);
            z = match step(&z, &u, &d, bounds, dt) {
                Ok(next) => next,
                Err(_) => {
                    return finish(Outcome::PlanFailure, t, trace, d_min, waypoints, records, replans)
                }
            };
            tick += 1;
            t = tick as f64 * dt;
            last_control = u;
            trace.push(TracePoint { t, state: z, control: u });
            d_min = d_min.min(clearance(&z));
            if map.occupied_at_world(z.x, z.y) {
                return finish(Outcome::Collision, t, trace, d_min, waypoints, records, replans);
            }
            if cfg.goal.contains(z.x, z.y) {
                return finish(Outcome::Success, t, trace, d_min, waypoints, records, replans);
            }
            if t >= cfg.timeout {
                return finish(Outcome::Timeout, t, trace, d_min, waypoints, records, replans);
            }
        }
    }
}

/// Difficulty from the minimum obstacle clearance along a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Difficulty {
    Hard,
    Medium,
    Easy,
}

/// Hard below 0.2 m, Medium in [0.2, 0.3] inclusive, Easy above 0.3 m.
pub fn difficulty(d_min: f64) -> Difficulty {
    if d_min < 0.2 {
        Difficulty::Hard
    } else if d_min <= 0.3 {
        Difficulty::Medium
    } else {
        Difficulty::Easy
    }
}

/// Count and successes for one difficulty class.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DifficultyBin {
    pub count: usize,
    pub successes: usize,
}

impl DifficultyBin {
    pub fn success_rate(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            100.0 * self.successes as f64 / self.count as f64
        }
    }
}

/// Aggregate episode statistics. Time statistics cover successful
/// episodes only; acceleration and jerk average |a| and |da/dt| per
/// episode over all episodes with at least two trace samples, then
/// report mean ± population std across episodes.
#[derive(Clone, Debug, PartialEq)]
pub struct Metrics {
    pub episodes: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub time_mean: f64,
    pub time_std: f64,
    pub accel_mean: f64,
    pub accel_std: f64,
    pub jerk_mean: f64,
    pub jerk_std: f64,
    pub hard: DifficultyBin,
    pub medium: DifficultyBin,
    pub easy: DifficultyBin,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Aggregates results into the benchmark statistics.
pub fn compute_metrics(results: &[EpisodeResult]) -> Metrics {
    let successes = results.iter().filter(|r| r.outcome == Outcome::Success).count();
    let times: Vec<f64> = results
        .iter()
        .filter(|r| r.outcome == Outcome::Success)
        .map(|r| r.time)
        .collect();
    let mut accels = Vec::new();
    let mut jerks = Vec::new();
    for r in results {
        if r.trace.len() < 2 {
            continue;
        }
        let dt = r.trace[1].t - r.trace[0].t;
        let a: Vec<f64> = r.trace.iter().map(|p| p.control.accel).collect();
        accels.push(a.iter().map(|x| x.abs()).sum::<f64>() / a.len() as f64);
        let jerk_sum: f64 = a.windows(2).map(|w| ((w[1] - w[0]) / dt).abs()).sum();
        jerks.push(jerk_sum / (a.len() - 1) as f64);
    }
    let mut hard = DifficultyBin::default();
    let mut medium = DifficultyBin::default();
    let mut easy = DifficultyBin::default();
    for r in results {
        let bin = match difficulty(r.d_min) {
            Difficulty::Hard => &mut hard,
            Difficulty::Medium => &mut medium,
            Difficulty::Easy => &mut easy,
        };
        bin.count += 1;
        if r.outcome == Outcome::Success {
            bin.successes += 1;
        }
    }
    let (time_mean, time_std) = mean_std(&times);
    let (accel_mean, accel_std) = mean_std(&accels);
    let (jerk_mean, jerk_std) = mean_std(&jerks);
    Metrics {
        episodes: results.len(),
        successes,
        success_rate: if results.is_empty() {
            f64::NAN
        } else {
            100.0 * successes as f64 / results.len() as f64
        },
        time_mean,
        time_std,
        accel_mean,
        accel_std,
        jerk_mean,
        jerk_std,
        hard,
        medium,
        easy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{DistanceField, Field2D};
    use approx::assert_relative_eq;

    fn flat_goal_cost(map: &OccupancyMap, goal: &GoalSpec) -> CostMap {
        // straight-line pull toward the goal, ignoring obstacles: cheap
        // to build and deliberately blind, for exercising outcomes
        let mut g = Field2D::filled(map, 0.0);
        for iy in 0..map.height() {
            for ix in 0..map.width() {
                let (cx, cy) = map.cell_center(ix, iy);
                g.set(ix, iy, (cx - goal.x).hypot(cy - goal.y));
            }
        }
        let d_goal = DistanceField { kind: DistanceKind::GoalDist, field: g };
        let d_obs = DistanceField {
            kind: DistanceKind::ObstacleDist,
            field: Field2D::filled(map, 10.0),
        };
        heuristic_cost(&d_obs, &d_goal, 0.3, 1.0).unwrap()
    }

    #[test]
    fn immediate_success_before_planning() {
        let map = OccupancyMap::empty(40, 40, 0.1, (0.0, 0.0)).unwrap();
        let goal = GoalSpec::new(2.0, 2.0, 0.3);
        let cfg = EpisodeConfig::new(VehicleState::new(2.1, 2.0, 0.0, 0.0), goal);
        let cost = flat_goal_cost(&map, &goal);
        let r = run_episode(&map, &cost, &cfg, &DynamicsBounds::default(), &PlannerConfig::default(), &LqrWeights::default());
        assert_eq!(r.outcome, Outcome::Success);
        assert_eq!(r.time, 0.0);
        assert_eq!(r.replans, 0);
        assert!(r.records.is_empty());
    }

    #[test]
    fn straight_run_reaches_goal_in_kinematic_time() {
        // goal 2 m ahead on an empty map: the kinematic lower bound is
        // 2 / 0.6 s; accel limits and the goal-entry geometry allow up
        // to 1.5x that
        let map = OccupancyMap::empty(60, 40, 0.1, (0.0, 0.0)).unwrap();
        let goal = GoalSpec::new(3.0, 2.0, 0.3);
        let mut cfg = EpisodeConfig::new(VehicleState::new(0.7, 2.0, 0.0, 0.0), goal);
        cfg.timeout = 20.0;
        let cost = flat_goal_cost(&map, &goal);
        let r = run_episode(&map, &cost, &cfg, &DynamicsBounds::default(), &PlannerConfig::default(), &LqrWeights::default());
        assert_eq!(r.outcome, Outcome::Success);
        let lower = 2.0 / 0.6;
        assert!(r.time >= lower - 0.3, "arrived implausibly fast: {}", r.time);
        assert!(r.time <= 1.5 * lower, "took too long: {}", r.time);
        assert_eq!(r.records.len(), r.replans);
        // label round-trip: egocentric label maps back to the recorded
        // world waypoint
        for (rec, wp) in r.records.iter().zip(&r.waypoints) {
            let at = r
                .trace
                .iter()
                .min_by(|a, b| (a.t - wp.t).abs().partial_cmp(&(b.t - wp.t).abs()).unwrap())
                .unwrap();
            let back = rec.label.to_world(&at.state);
            assert_relative_eq!(back.x, wp.planned.x, epsilon = 1e-9);
            assert_relative_eq!(back.y, wp.planned.y, epsilon = 1e-9);
        }
    }

    #[test]
    fn blind_cost_map_walks_into_the_wall() {
        // a cost that pulls straight at the goal through a wall must end
        // in a recorded collision, with every earlier sample free
        let art = "\
####################\n\
#........#.........#\n\
#........#.........#\n\
#........#.........#\n\
#........#.........#\n\
#........#.........#\n\
#........#.........#\n\
#........#.........#\n\
####################";
        let map = OccupancyMap::from_ascii(art, 0.2, (0.0, 0.0)).unwrap();
        let goal = GoalSpec::new(3.5, 0.9, 0.2);
        let mut cfg = EpisodeConfig::new(VehicleState::new(0.5, 0.9, 0.0, 0.0), goal);
        cfg.timeout = 30.0;
        let cost = flat_goal_cost(&map, &goal);
        let r = run_episode(&map, &cost, &cfg, &DynamicsBounds::default(), &PlannerConfig::default(), &LqrWeights::default());
        assert_eq!(r.outcome, Outcome::Collision);
        let last = r.trace.last().unwrap();
        assert!(map.occupied_at_world(last.state.x, last.state.y));
        for p in &r.trace[..r.trace.len() - 1] {
            assert!(!map.occupied_at_world(p.state.x, p.state.y));
        }
        assert!(r.d_min <= 0.0 + 0.2); // ended at the wall
    }

    #[test]
    fn timeout_and_plan_failure_outcomes() {
        let map = OccupancyMap::empty(60, 40, 0.1, (0.0, 0.0)).unwrap();
        let goal = GoalSpec::new(5.0, 2.0, 0.3);
        let mut cfg = EpisodeConfig::new(VehicleState::new(0.7, 2.0, 0.0, 0.0), goal);
        cfg.timeout = 0.5;
        let cost = flat_goal_cost(&map, &goal);
        let r = run_episode(&map, &cost, &cfg, &DynamicsBounds::default(), &PlannerConfig::default(), &LqrWeights::default());
        assert_eq!(r.outcome, Outcome::Timeout);
        assert_relative_eq!(r.time, 0.5, epsilon = 1e-9);

        // an all-unreachable cost map cannot be planned on
        let d_obs = DistanceField {
            kind: DistanceKind::ObstacleDist,
            field: Field2D::filled(&map, 1.0),
        };
        let d_goal = DistanceField {
            kind: DistanceKind::GoalDist,
            field: Field2D::filled(&map, 2e6),
        };
        let broken = heuristic_cost(&d_obs, &d_goal, 0.3, 1.0).unwrap();
        let r = run_episode(&map, &broken, &cfg, &DynamicsBounds::default(), &PlannerConfig::default(), &LqrWeights::default());
        assert_eq!(r.outcome, Outcome::PlanFailure);
        assert_eq!(r.time, 0.0);
    }

    #[test]
    fn episodes_are_deterministic() {
        let map = OccupancyMap::empty(60, 40, 0.1, (0.0, 0.0)).unwrap();
        let goal = GoalSpec::new(3.0, 2.0, 0.3);
        let mut cfg = EpisodeConfig::new(VehicleState::new(0.7, 2.2, 0.0, 0.1), goal);
        cfg.noise_xy = 0.1;
        cfg.noise_theta = 0.05;
        cfg.seed = 42;
        cfg.timeout = 20.0;
        let cost = flat_goal_cost(&map, &goal);
        let bounds = DynamicsBounds::default();
        let a = run_episode(&map, &cost, &cfg, &bounds, &PlannerConfig::default(), &LqrWeights::default());
        let b = run_episode(&map, &cost, &cfg, &bounds, &PlannerConfig::default(), &LqrWeights::default());
        assert_eq!(a, b);
        let mut other = cfg;
        other.seed = 43;
        let c = run_episode(&map, &cost, &cfg, &bounds, &PlannerConfig::default(), &LqrWeights::default());
        let d = run_episode(&map, &cost, &other, &bounds, &PlannerConfig::default(), &LqrWeights::default());
        assert_eq!(a, c);
        assert_ne!(a.trace, d.trace);
    }

    #[test]
    fn waypoint_noise_is_truncated_and_applied() {
        let map = OccupancyMap::empty(60, 40, 0.1, (0.0, 0.0)).unwrap();
        let goal = GoalSpec::new(4.0, 2.0, 0.3);
        let mut cfg = EpisodeConfig::new(VehicleState::new(0.7, 2.0, 0.0, 0.0), goal);
        cfg.noise_xy = 0.1;
        cfg.noise_theta = 0.05;
        cfg.seed = 7;
        cfg.timeout = 20.0;
        let cost = flat_goal_cost(&map, &goal);
        let r = run_episode(&map, &cost, &cfg, &DynamicsBounds::default(), &PlannerConfig::default(), &LqrWeights::default());
        let mut any_moved = false;
        for wp in &r.waypoints {
            let dx = wp.executed.x - wp.planned.x;
            let dy = wp.executed.y - wp.planned.y;
            let dth = crate::dynamics::wrap_angle(wp.executed.theta - wp.planned.theta);
            assert!(dx.abs() <= 3.0 * cfg.noise_xy + 1e-12);
            assert!(dy.abs() <= 3.0 * cfg.noise_xy + 1e-12);
            assert!(dth.abs() <= 3.0 * cfg.noise_theta + 1e-12);
            any_moved |= dx.abs() + dy.abs() > 1e-12;
        }
        assert!(any_moved, "noise configured but no waypoint moved");
    }

    #[test]
    fn crop_geometry_sees_a_wall_ahead() {
        let map = {
            let mut m = OccupancyMap::empty(40, 40, 0.1, (0.0, 0.0)).unwrap();
            for iy in 0..40 {
                m.set(30, iy, true); // wall at x = 3.0..3.1
            }
            m
        };
        let spec = CropSpec { size_m: 2.0, pixels: 20 };
        // robot at (2.0, 2.0) facing +x: the wall is 1.0 m ahead, which
        // lands in forward column 10 of a 2 m / 20 px window
        let z = VehicleState::new(2.0, 2.0, 0.0, 0.0);
        let crop = egocentric_crop(&map, &z, &spec);
        let mid_row = 10;
        assert!(crop.cells[mid_row * 20 + 10]);
        assert!(!crop.cells[mid_row * 20 + 5]);
        // facing +y from (2.1, 2.0): the wall is 0.95 m to the right,
        // inside the rightmost lateral band (high row numbers)
        let z = VehicleState::new(2.1, 2.0, 0.0, core::f64::consts::PI / 2.0);
        let crop = egocentric_crop(&map, &z, &spec);
        assert!(crop.cells[19 * 20 + 5]); // rightmost band
        assert!(!crop.cells[0 * 20 + 5]); // leftmost band is free space
    }

    #[test]
    fn difficulty_thresholds() {
        assert_eq!(difficulty(0.19), Difficulty::Hard);
        assert_eq!(difficulty(0.2), Difficulty::Medium);
        assert_eq!(difficulty(0.25), Difficulty::Medium);
        assert_eq!(difficulty(0.3), Difficulty::Medium);
        assert_eq!(difficulty(0.31), Difficulty::Easy);
    }

    #[test]
    fn metrics_aggregation() {
        let mk = |outcome: Outcome, time: f64, d_min: f64, accel: f64| EpisodeResult {
            outcome,
            time,
            trace: vec![
                TracePoint {
                    t: 0.0,
                    state: VehicleState::new(0.0, 0.0, 0.5, 0.0),
                    control: ControlInput { accel, omega: 0.0 },
                },
                TracePoint {
                    t: 0.05,
                    state: VehicleState::new(0.025, 0.0, 0.5, 0.0),
                    control: ControlInput { accel, omega: 0.0 },
                },
            ],
            d_min,
            waypoints: Vec::new(),
            records: Vec::new(),
            replans: 1,
        };
        let all_good = [
            mk(Outcome::Success, 10.0, 0.25, 0.0),
            mk(Outcome::Success, 14.0, 0.4, 0.0),
        ];
        let m = compute_metrics(&all_good);
        assert_relative_eq!(m.success_rate, 100.0);
        assert_relative_eq!(m.time_mean, 12.0);
        assert_relative_eq!(m.time_std, 2.0);
        // constant controls: zero acceleration magnitude and zero jerk
        assert_relative_eq!(m.accel_mean, 0.0);
        assert_relative_eq!(m.jerk_mean, 0.0);
        assert_eq!(m.medium.count, 1);
        assert_eq!(m.easy.count, 1);

        let mixed = [
            mk(Outcome::Success, 10.0, 0.1, 0.2),
            mk(Outcome::Collision, 3.0, 0.0, 0.2),
        ];
        let m = compute_metrics(&mixed);
        assert_relative_eq!(m.success_rate, 50.0);
        // time statistics exclude the failed episode
        assert_relative_eq!(m.time_mean, 10.0);
        assert_eq!(m.hard.count, 2);
        assert_eq!(m.hard.successes, 1);
        assert_relative_eq!(m.accel_mean, 0.2);
    }
}
