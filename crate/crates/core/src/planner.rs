//! Receding-horizon waypoint planner.
//!
//! Samples a local waypoint grid ahead of the robot, fits a cubic spline
//! in the flat outputs (x, y) to each candidate with Hermite boundary
//! conditions, recovers speed, heading, turn rate and acceleration from
//! the flat outputs, filters candidates that violate the control bounds,
//! and picks the candidate with the least cost-map sum over its samples.
//! Everything is deterministic: candidates are enumerated in a fixed
//! order and cost ties resolve to the earlier index.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)] // resolves float methods in the no_std build
use num_traits::Float as _;

use crate::cost::CostMap;
use crate::dynamics::{wrap_angle, ControlInput, DynamicsBounds, VehicleState};

/// A terminal pose for one planning segment. `Egocentric` poses are
/// relative to the robot (x forward, y left, θ relative heading).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frame {
    Egocentric,
    World,
}

/// Candidate terminal pose (x̂, ŷ, θ̂).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Waypoint {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub frame: Frame,
}

impl Waypoint {
    pub fn egocentric(x: f64, y: f64, theta: f64) -> Self {
        Waypoint { x, y, theta: wrap_angle(theta), frame: Frame::Egocentric }
    }

    pub fn world(x: f64, y: f64, theta: f64) -> Self {
        Waypoint { x, y, theta: wrap_angle(theta), frame: Frame::World }
    }

    /// Expresses an egocentric waypoint in the world frame of `robot`.
    pub fn to_world(&self, robot: &VehicleState) -> Waypoint {
        match self.frame {
            Frame::World => *self,
            Frame::Egocentric => {
                let (s, c) = robot.phi.sin_cos();
                Waypoint {
                    x: robot.x + self.x * c - self.y * s,
                    y: robot.y + self.x * s + self.y * c,
                    theta: wrap_angle(robot.phi + self.theta),
                    frame: Frame::World,
                }
            }
        }
    }

    /// Expresses a world waypoint relative to `robot`.
    pub fn to_egocentric(&self, robot: &VehicleState) -> Waypoint {
        match self.frame {
            Frame::Egocentric => *self,
            Frame::World => {
                let (s, c) = robot.phi.sin_cos();
                let dx = self.x - robot.x;
                let dy = self.y - robot.y;
                Waypoint {
                    x: dx * c + dy * s,
                    y: -dx * s + dy * c,
                    theta: wrap_angle(self.theta - robot.phi),
                    frame: Frame::Egocentric,
                }
            }
        }
    }
}

/// Terminal-speed convention at the waypoint. Every variant keeps a
/// strictly positive floor, which avoids degenerate zero-tangent splines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TerminalSpeedRule {
    /// 2·distance/H − v₀, clamped to [floor_frac·v_max, v_max]: the
    /// terminal speed a constant-acceleration ramp over the segment
    /// would end at. Far candidates accelerate, near ones decelerate,
    /// and a cruise-distance candidate holds speed; pinning the terminal
    /// speed to the start speed instead leaves no control-feasible way
    /// to ever speed up.
    DistanceConsistent { floor_frac: f64 },
    /// Start speed clamped to [floor_frac·v_max, v_max].
    ClampedStart { floor_frac: f64 },
    Fixed(f64),
}

impl TerminalSpeedRule {
    pub fn speed(&self, start_v: f64, distance: f64, horizon: f64, bounds: &DynamicsBounds) -> f64 {
        match *self {
            TerminalSpeedRule::DistanceConsistent { floor_frac } => (2.0 * distance / horizon
                - start_v)
                .max(floor_frac * bounds.v_max)
                .min(bounds.v_max),
            TerminalSpeedRule::ClampedStart { floor_frac } => {
                start_v.max(floor_frac * bounds.v_max).min(bounds.v_max)
            }
            TerminalSpeedRule::Fixed(v) => v,
        }
    }
}

/// Waypoint grid extents (egocentric), horizon and sampling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlannerConfig {
    /// Forward offsets (m); must start above zero so every candidate
    /// lies ahead of the robot.
    pub forward: (f64, f64),
    pub forward_count: usize,
    /// Lateral offsets (m), positive to the left.
    pub lateral: (f64, f64),
    pub lateral_count: usize,
    /// Relative headings (rad).
    pub heading: (f64, f64),
    pub heading_count: usize,
    /// Planning horizon H (s).
    pub horizon: f64,
    /// Sample period Δt (s); H must be an integer multiple.
    pub dt: f64,
    pub terminal_speed: TerminalSpeedRule,
}

impl Default for PlannerConfig {
    /// 11 × 11 × 7 = 847 candidates over 1.5 s at 20 Hz sampling. The
    /// forward range starts at 0.15 m: from rest, with ā = 0.4 m/s² and
    /// H = 1.5 s, no farther candidate admits a control-feasible spline.
    fn default() -> Self {
        PlannerConfig {
            forward: (0.15, 2.2),
            forward_count: 11,
            lateral: (-1.2, 1.2),
            lateral_count: 11,
            heading: (-PI / 2.0, PI / 2.0),
            heading_count: 7,
            horizon: 1.5,
            dt: 0.05,
            terminal_speed: TerminalSpeedRule::DistanceConsistent { floor_frac: 0.1 },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlanError {
    /// Start pose and waypoint pose coincide.
    DegenerateWaypoint,
    /// Horizon not a positive integer multiple of the sample period.
    BadHorizon { horizon: f64, dt: f64 },
    /// fit_spline needs the waypoint in the world frame.
    WaypointNotWorld,
    /// Every candidate was infeasible or crossed unreachable cost.
    NoFeasiblePlan { candidates: usize, infeasible: usize, unreachable: usize },
    /// The waypoint grid is empty.
    EmptyGrid,
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanError::DegenerateWaypoint => write!(f, "waypoint coincides with the start pose"),
            PlanError::BadHorizon { horizon, dt } => {
                write!(f, "horizon {horizon} is not a positive multiple of dt {dt}")
            }
            PlanError::WaypointNotWorld => write!(f, "waypoint must be in the world frame"),
            PlanError::NoFeasiblePlan { candidates, infeasible, unreachable } => write!(
                f,
                "no feasible plan: {candidates} candidates, {infeasible} control-infeasible, {unreachable} through unreachable cost"
            ),
            PlanError::EmptyGrid => write!(f, "waypoint grid is empty"),
        }
    }
}

/// A sampled flat-output trajectory: states and controls at every Δt
/// plus the cubic coefficients (per axis, over normalized time s ∈ [0,1]).
#[derive(Clone, Debug, PartialEq)]
pub struct SplineTrajectory {
    pub horizon: f64,
    pub dt: f64,
    pub states: Vec<VehicleState>,
    pub controls: Vec<ControlInput>,
    pub coeffs: [[f64; 4]; 2],
}

impl SplineTrajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Final sampled state (the waypoint pose).
    pub fn terminal(&self) -> &VehicleState {
        self.states.last().expect("sampled trajectory is never empty")
    }
}

/// Enumerates the egocentric candidate grid (forward × lateral × heading,
/// heading fastest) transformed into the world frame at `state`.
pub fn sample_waypoint_grid(state: &VehicleState, cfg: &PlannerConfig) -> Vec<Waypoint> {
    let axis = |range: (f64, f64), count: usize, k: usize| {
        if count <= 1 {
            0.5 * (range.0 + range.1)
        } else {
            range.0 + (range.1 - range.0) * k as f64 / (count - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(cfg.forward_count * cfg.lateral_count * cfg.heading_count);
    for i in 0..cfg.forward_count {
        let f = axis(cfg.forward, cfg.forward_count, i);
        for j in 0..cfg.lateral_count {
            let l = axis(cfg.lateral, cfg.lateral_count, j);
            for k in 0..cfg.heading_count {
                let t = axis(cfg.heading, cfg.heading_count, k);
                out.push(Waypoint::egocentric(f, l, t).to_world(state));
            }
        }
    }
    out
}

/// Fits the cubic flat-output spline from `start` to `waypoint` with
/// Hermite boundary conditions: position and velocity vector at both
/// ends. The start tangent direction is the current heading (which also
/// covers v = 0, where the velocity vector itself carries no direction);
/// the end tangent runs along θ̂ at `terminal_speed`.
pub fn fit_spline(
    start: &VehicleState,
    waypoint: &Waypoint,
    horizon: f64,
    dt: f64,
    terminal_speed: f64,
) -> Result<SplineTrajectory, PlanError> {
    if waypoint.frame != Frame::World {
        return Err(PlanError::WaypointNotWorld);
    }
    if !(horizon > 0.0) || !(dt > 0.0) {
        return Err(PlanError::BadHorizon { horizon, dt });
    }
    let steps = (horizon / dt).round();
    if steps < 1.0 || (steps * dt - horizon).abs() > 1e-9 {
        return Err(PlanError::BadHorizon { horizon, dt });
    }
    let n = steps as usize;
    let dpos = (waypoint.x - start.x).hypot(waypoint.y - start.y);
    if dpos < 1e-9 && wrap_angle(waypoint.theta - start.phi).abs() < 1e-9 {
        return Err(PlanError::DegenerateWaypoint);
    }

    let mut coeffs = [[0.0f64; 4]; 2];
    let t0 = [start.v * horizon * start.phi.cos(), start.v * horizon * start.phi.sin()];
    let t1 = [
        terminal_speed * horizon * waypoint.theta.cos(),
        terminal_speed * horizon * waypoint.theta.sin(),
    ];
    let p0 = [start.x, start.y];
    let p1 = [waypoint.x, waypoint.y];
    for ax in 0..2 {
        let d = p1[ax] - p0[ax];
        coeffs[ax] = [
            p0[ax],
            t0[ax],
            3.0 * d - 2.0 * t0[ax] - t1[ax],
            -2.0 * d + t0[ax] + t1[ax],
        ];
    }

    let eval = |c: &[f64; 4], s: f64| c[0] + s * (c[1] + s * (c[2] + s * c[3]));
    let d1 = |c: &[f64; 4], s: f64| c[1] + s * (2.0 * c[2] + s * 3.0 * c[3]);
    let d2 = |c: &[f64; 4], s: f64| 2.0 * c[2] + 6.0 * c[3] * s;

    let mut states: Vec<VehicleState> = Vec::with_capacity(n + 1);
    let mut controls = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let s = i as f64 / n as f64;
        let x = eval(&coeffs[0], s);
        let y = eval(&coeffs[1], s);
        let xd = d1(&coeffs[0], s) / horizon;
        let yd = d1(&coeffs[1], s) / horizon;
        let xdd = d2(&coeffs[0], s) / (horizon * horizon);
        let ydd = d2(&coeffs[1], s) / (horizon * horizon);
        let v = xd.hypot(yd);
        // at zero speed the flat outputs carry no direction: keep the
        // previous heading (the start heading for the first sample)
        let phi = if v > 1e-9 {
            yd.atan2(xd)
        } else if i == 0 {
            start.phi
        } else {
            states[i - 1].phi
        };
        // longitudinal acceleration: curvature-free projection onto the
        // tangent, valid at v = 0 as well
        let accel = xdd * phi.cos() + ydd * phi.sin();
        let omega = if v > 1e-9 { (xd * ydd - yd * xdd) / (v * v) } else { 0.0 };
        states.push(VehicleState { x, y, v, phi });
        controls.push(ControlInput { accel, omega });
    }
    // turn rate at singular samples from the heading sequence itself
    for i in 0..=n {
        if states[i].v <= 1e-9 {
            controls[i].omega = if i < n {
                wrap_angle(states[i + 1].phi - states[i].phi) / dt
            } else {
                wrap_angle(states[i].phi - states[i - 1].phi) / dt
            };
        }
    }
    Ok(SplineTrajectory { horizon, dt, states, controls, coeffs })
}

/// True iff every sample satisfies v ∈ [0, v̄], |ω| ≤ ω̄ and |a| ≤ ā.
/// The comparison is exact: a sample at v̄ + 1e−9 fails.
pub fn check_feasibility(traj: &SplineTrajectory, bounds: &DynamicsBounds) -> bool {
    traj.states.iter().zip(&traj.controls).all(|(z, u)| {
        z.v >= 0.0
            && z.v <= bounds.v_max
            && u.omega.abs() <= bounds.omega_max
            && u.accel.abs() <= bounds.accel_max
    })
}

/// Cost of a candidate: the cost-map sum over all samples, or None if
/// any sample lands on unreachable (or off-map) cost.
fn trajectory_cost(traj: &SplineTrajectory, cost_map: &CostMap) -> Option<f64> {
    let mut sum = 0.0;
    for z in &traj.states {
        let c = cost_map.value_at(z);
        if cost_map.is_unreachable(c) {
            return None;
        }
        sum += c;
    }
    Some(sum)
}

/// Solves one receding-horizon step: fits a spline to every candidate
/// waypoint, drops control-infeasible ones, sums the cost map over each
/// surviving trajectory and returns the cheapest (earliest grid index on
/// ties). The result is independent of candidate evaluation order.
pub fn plan(
    state: &VehicleState,
    cost_map: &CostMap,
    cfg: &PlannerConfig,
    bounds: &DynamicsBounds,
) -> Result<(Waypoint, SplineTrajectory), PlanError> {
    let candidates = sample_waypoint_grid(state, cfg);
    if candidates.is_empty() {
        return Err(PlanError::EmptyGrid);
    }
    let mut infeasible = 0usize;
    let mut unreachable = 0usize;
    let mut best: Option<(f64, usize, SplineTrajectory)> = None;
    for (idx, wp) in candidates.iter().enumerate() {
        let distance = (wp.x - state.x).hypot(wp.y - state.y);
        let terminal_speed = cfg.terminal_speed.speed(state.v, distance, cfg.horizon, bounds);
        let traj = match fit_spline(state, wp, cfg.horizon, cfg.dt, terminal_speed) {
            Ok(t) => t,
            Err(_) => {
                infeasible += 1;
                continue;
            }
        };
        if !check_feasibility(&traj, bounds) {
            infeasible += 1;
            continue;
        }
        match trajectory_cost(&traj, cost_map) {
            None => unreachable += 1,
            Some(cost) => {
                if best.as_ref().is_none_or(|(c, _, _)| cost < *c) {
                    best = Some((cost, idx, traj));
                }
            }
        }
    }
    match best {
        Some((_, idx, traj)) => Ok((candidates[idx], traj)),
        None => Err(PlanError::NoFeasiblePlan {
            candidates: candidates.len(),
            infeasible,
            unreachable,
        }),
    }
}
