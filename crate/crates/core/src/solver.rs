//! Stationary Hamilton–Jacobi solver: Lax–Friedrichs fast sweeping.
//!
//! Solves the time-to-reach and time-to-collision PDEs
//!
//!   max_u min_d { −∇T·f(z,u,d) − 1 } = 0   (reach),
//!   min_u max_d { −∇T·f(z,u,d) − 1 } = 0   (avoid),
//!
//! on a [`Grid4D`] by Gauss–Seidel sweeps in the 2⁴ axis-direction
//! orderings. Each node update uses central differences plus directional
//! Lax–Friedrichs dissipation σᵢ ≥ |∂H/∂pᵢ|, solved for the node value
//! and combined with a min-update so values decrease monotonically from
//! their initialization. Reach values start at the unreachable sentinel,
//! avoid values at the cap T̄; nodes never touched by a front keep their
//! initialization, which is exactly the intended boundary limit.
//!
//! Neighbors holding the sentinel (obstacles in the reach problem,
//! unreached territory ahead of the front) and missing neighbors at
//! non-periodic domain edges are replaced by linear extrapolation ghosts,
//! which reduces the stencil to one-sided differences there; for the
//! eikonal special case this reproduces the classic upwind update.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)] // resolves float methods in the no_std build
use num_traits::Float as _;

use crate::dynamics::{
    optimal_control, step, ControlInput, Disturbance, DynamicsBounds, Mode, VehicleState,
};
use crate::grid::{FieldKind, Grid4D, GridError, ValueField, DEFAULT_UNREACHABLE, DIM_PHI, DIM_V};
use crate::map::OccupancyMap;

/// Goal disk in the plane: every (x, y) within `radius` of the center
/// counts as arrived, at any speed and heading.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoalSpec {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
}

impl GoalSpec {
    pub fn new(x: f64, y: f64, radius: f64) -> Self {
        GoalSpec { x, y, radius }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (x - self.x).hypot(y - self.y) <= self.radius
    }
}

/// Choice of Lax–Friedrichs dissipation coefficients. Either way the
/// coefficients dominate the Hamiltonian characteristic speeds
/// |∂H/∂pᵢ|, which keeps the scheme monotone.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Dissipation {
    /// Per-node coefficients from the local speeds: σₓ = v|cosφ| + d̄ₓᵧ,
    /// σ_y = v|sinφ| + d̄ₓᵧ, σ_v = ā, σ_φ = |ω̄ ∓ d̄_φ|. Much sharper
    /// fronts than the global bound at identical grid resolution.
    Local,
    /// Fixed per-dimension coefficients, shared by every node. Useful
    /// when two solves must use the byte-identical stencil.
    Global([f64; 4]),
}

/// Sweeping parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveConfig {
    /// Convergence tolerance: max node change per full sweep cycle (s).
    /// Sweeping actually continues to a quarter of this so that solves
    /// under different sweep schedules agree within 2× tolerance.
    pub tolerance: f64,
    /// Give up after this many full 16-sweep cycles.
    pub max_cycles: usize,
    pub dissipation: Dissipation,
    /// Cap T̄ on time-to-collision values (s).
    pub ttc_cap: f64,
    /// Finite sentinel standing in for the PDE's infinite boundary value.
    pub unreachable: f64,
    /// Order of the 16 directional sweeps within a cycle. At convergence
    /// the result is schedule-independent to within the tolerance.
    pub schedule: [u8; 16],
}

impl SolveConfig {
    /// Defaults: local dissipation, ε = 1e−3 s, T̄ = 4 s, 500 cycles.
    pub fn for_bounds(_bounds: &DynamicsBounds) -> Self {
        SolveConfig {
            tolerance: 1e-3,
            max_cycles: 500,
            dissipation: Dissipation::Local,
            ttc_cap: 4.0,
            unreachable: DEFAULT_UNREACHABLE,
            schedule: core::array::from_fn(|i| i as u8),
        }
    }
}

/// Global bounds on the Hamiltonian characteristic speeds, for
/// [`Dissipation::Global`].
pub fn dissipation_for(bounds: &DynamicsBounds) -> [f64; 4] {
    [
        bounds.v_max + bounds.dxy_max,
        bounds.v_max + bounds.dxy_max,
        bounds.accel_max,
        bounds.omega_max + bounds.dphi_max,
    ]
}

/// Grid resolution spec used to build a [`Grid4D`] covering a map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    /// Node spacing in x and y (m).
    pub xy_resolution: f64,
    pub v_count: usize,
    pub phi_count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { xy_resolution: 0.1, v_count: 7, phi_count: 24 }
    }
}

/// Builds the state-space grid spanning a map's world extent.
pub fn grid_for_map(map: &OccupancyMap, spec: &GridSpec, v_max: f64) -> Result<Grid4D, GridError> {
    let (min, max) = map.world_bounds();
    let nx = ((max.0 - min.0) / spec.xy_resolution).round() as usize + 1;
    let ny = ((max.1 - min.1) / spec.xy_resolution).round() as usize + 1;
    Grid4D::new(
        [(min.0, max.0), (min.1, max.1), (0.0, v_max), (-PI, PI)],
        [nx, ny, spec.v_count, spec.phi_count],
        [false, false, false, true],
    )
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    /// Residual never fell below the tolerance.
    NotConverged { residual: f64, cycles: usize },
    /// The goal disk contains no free grid node.
    GoalBlocked,
    Grid(GridError),
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::NotConverged { residual, cycles } => {
                write!(f, "sweeping did not converge after {cycles} cycles (residual {residual:.3e})")
            }
            SolveError::GoalBlocked => write!(f, "goal disk contains no free grid node"),
            SolveError::Grid(e) => write!(f, "grid error: {e}"),
        }
    }
}

impl From<GridError> for SolveError {
    fn from(e: GridError) -> Self {
        SolveError::Grid(e)
    }
}

/// A converged field plus the residual history (max node change per
/// sweep cycle).
#[derive(Clone, Debug)]
pub struct SolverOutput {
    pub field: ValueField,
    pub residuals: Vec<f64>,
}

/// Solves the reach PDE: the minimum time to drive into the goal disk
/// while avoiding occupied cells, under worst-case disturbance. Goal
/// nodes carry exactly 0, occupied nodes exactly the sentinel.
pub fn solve_ttr(
    grid: &Grid4D,
    bounds: &DynamicsBounds,
    goal: &GoalSpec,
    map: &OccupancyMap,
    cfg: &SolveConfig,
) -> Result<SolverOutput, SolveError> {
    let occupied = column_occupancy(grid, map);
    let nx = grid.counts()[0];
    let ny = grid.counts()[1];
    let mut goal_mask = vec![false; nx * ny];
    let mut any_free_goal = false;
    for iy in 0..ny {
        for ix in 0..nx {
            let inside = goal.contains(grid.coord(0, ix), grid.coord(1, iy));
            goal_mask[iy * nx + ix] = inside;
            any_free_goal |= inside && !occupied[iy * nx + ix];
        }
    }
    if !any_free_goal {
        return Err(SolveError::GoalBlocked);
    }

    let mut field = ValueField::filled(grid.clone(), FieldKind::Ttr, cfg.unreachable, cfg.unreachable);
    let mut pinned = vec![false; grid.len()];
    for lin in 0..grid.len() {
        let [ix, iy, _, _] = grid.unindex(lin);
        let col = iy * nx + ix;
        if occupied[col] {
            pinned[lin] = true; // stays at the sentinel
        } else if goal_mask[col] {
            pinned[lin] = true;
            field.values_mut()[lin] = 0.0;
        }
    }

    let residuals = sweep_to_convergence(&mut field, &pinned, bounds, Mode::Reach, cfg)?;
    Ok(SolverOutput { field, residuals })
}

/// Solves the avoid PDE: the maximum time until the occupied set is hit
/// under optimally evasive control and worst-case disturbance, capped at
/// T̄. Occupied nodes carry exactly 0; nodes the cap protects stay at T̄.
pub fn solve_ttc(
    grid: &Grid4D,
    bounds: &DynamicsBounds,
    map: &OccupancyMap,
    cfg: &SolveConfig,
) -> Result<SolverOutput, SolveError> {
    let occupied = column_occupancy(grid, map);
    let nx = grid.counts()[0];

    let mut field = ValueField::filled(grid.clone(), FieldKind::Ttc, cfg.ttc_cap, cfg.unreachable);
    let mut pinned = vec![false; grid.len()];
    for lin in 0..grid.len() {
        let [ix, iy, _, _] = grid.unindex(lin);
        if occupied[iy * nx + ix] {
            pinned[lin] = true;
            field.values_mut()[lin] = 0.0;
        }
    }

    let residuals = sweep_to_convergence(&mut field, &pinned, bounds, Mode::Avoid, cfg)?;
    Ok(SolverOutput { field, residuals })
}

/// Occupancy sampled at grid node positions, one flag per (x, y) column.
fn column_occupancy(grid: &Grid4D, map: &OccupancyMap) -> Vec<bool> {
    let nx = grid.counts()[0];
    let ny = grid.counts()[1];
    let mut occ = vec![false; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            occ[iy * nx + ix] = map.occupied_at_world(grid.coord(0, ix), grid.coord(1, iy));
        }
    }
    occ
}

/// Runs full sweep cycles until the residual drops below the internal
/// target (a quarter of the configured tolerance, so that independently
/// ordered solves land within 2× tolerance of each other).
fn sweep_to_convergence(
    field: &mut ValueField,
    pinned: &[bool],
    bounds: &DynamicsBounds,
    mode: Mode,
    cfg: &SolveConfig,
) -> Result<Vec<f64>, SolveError> {
    let grid = field.grid().clone();
    let counts = grid.counts();
    let strides = [
        1usize,
        counts[0],
        counts[0] * counts[1],
        counts[0] * counts[1] * counts[2],
    ];
    let h: [f64; 4] = core::array::from_fn(|d| grid.axis(d).spacing);

    // node-dependent Hamiltonian coefficients, precomputed per axis index
    let cos_phi: Vec<f64> = (0..counts[3]).map(|i| grid.coord(DIM_PHI, i).cos()).collect();
    let sin_phi: Vec<f64> = (0..counts[3]).map(|i| grid.coord(DIM_PHI, i).sin()).collect();
    let speeds: Vec<f64> = (0..counts[2]).map(|i| grid.coord(DIM_V, i)).collect();

    // dissipation over spacing, per (v, phi) pair: sxh, syh, svh, sphih
    // and the combined denominator
    let nphi = counts[3];
    let mut sig = vec![[0.0f64; 5]; counts[2] * nphi];
    for iv in 0..counts[2] {
        for iphi in 0..nphi {
            let s = match cfg.dissipation {
                Dissipation::Global(g) => g,
                Dissipation::Local => {
                    let dphi_sigma = match mode {
                        Mode::Reach => (bounds.omega_max - bounds.dphi_max).abs(),
                        Mode::Avoid => bounds.omega_max + bounds.dphi_max,
                    };
                    [
                        speeds[iv] * cos_phi[iphi].abs() + bounds.dxy_max,
                        speeds[iv] * sin_phi[iphi].abs() + bounds.dxy_max,
                        bounds.accel_max,
                        dphi_sigma,
                    ]
                }
            };
            let over_h = [s[0] / h[0], s[1] / h[1], s[2] / h[2], s[3] / h[3]];
            sig[iv * nphi + iphi] =
                [over_h[0], over_h[1], over_h[2], over_h[3], over_h.iter().sum()];
        }
    }

    // ghost threshold: values at or above it are treated as absent data
    // (sentinel plateau), not as Dirichlet values
    let ghost_at = cfg.unreachable;
    let target = cfg.tolerance * 0.25;

    let (sa, sw) = match mode {
        Mode::Reach => (1.0, -1.0), // control helps, disturbance hurts
        Mode::Avoid => (-1.0, 1.0),
    };

    let mut residuals = Vec::new();
    for _cycle in 0..cfg.max_cycles {
        let mut max_change = 0.0f64;
        for &ordering in cfg.schedule.iter() {
            let dir: [bool; 4] = core::array::from_fn(|d| ordering & (1 << d) != 0);
            let pick = |d: usize, k: usize| if dir[d] { counts[d] - 1 - k } else { k };
            let vals = field.values_mut();
            for kphi in 0..counts[3] {
                let iphi = pick(3, kphi);
                let (cp, sp) = (cos_phi[iphi], sin_phi[iphi]);
                for kv in 0..counts[2] {
                    let iv = pick(2, kv);
                    let vnode = speeds[iv];
                    let [sxh, syh, svh, sphih, denom] = sig[iv * nphi + iphi];
                    let sig_h = [sxh, syh, svh, sphih];
                    for ky in 0..counts[1] {
                        let iy = pick(1, ky);
                        let row = iphi * strides[3] + iv * strides[2] + iy * strides[1];
                        for kx in 0..counts[0] {
                            let ix = pick(0, kx);
                            let lin = row + ix;
                            if pinned[lin] {
                                continue;
                            }
                            let vi = vals[lin];
                            let idx = [ix, iy, iv, iphi];
                            let mut p = [0.0f64; 4];
                            let mut dissip = 0.0f64;
                            for d in 0..4 {
                                let i = idx[d];
                                let n = counts[d];
                                let (mut m, mut pl) = (f64::NAN, f64::NAN);
                                if grid.axis(d).periodic {
                                    m = vals[lin - i * strides[d]
                                        + ((i + n - 1) % n) * strides[d]];
                                    pl = vals[lin - i * strides[d] + ((i + 1) % n) * strides[d]];
                                } else {
                                    if i > 0 {
                                        m = vals[lin - strides[d]];
                                    }
                                    if i + 1 < n {
                                        pl = vals[lin + strides[d]];
                                    }
                                }
                                let have_m = m.is_finite() && m < ghost_at;
                                let have_p = pl.is_finite() && pl < ghost_at;
                                // extrapolation ghosts clamp at the finite
                                // side so an absent neighbor can only feed
                                // outflow, never fabricate inflow
                                let (vm, vp) = match (have_m, have_p) {
                                    (true, true) => (m, pl),
                                    (true, false) => (m, (2.0 * vi - m).max(m)),
                                    (false, true) => ((2.0 * vi - pl).max(pl), pl),
                                    (false, false) => (vi, vi),
                                };
                                p[d] = (vp - vm) / (2.0 * h[d]);
                                dissip += sig_h[d] * 0.5 * (vp + vm);
                            }
                            // optimized Hamiltonian without the -1 term
                            let hham = -p[0] * vnode * cp - p[1] * vnode * sp
                                + sa * (bounds.accel_max * p[2].abs()
                                    + bounds.omega_max * p[3].abs())
                                + sw * (bounds.dxy_max * p[0].hypot(p[1])
                                    + bounds.dphi_max * p[3].abs());
                            let candidate = (1.0 - hham + dissip) / denom;
                            if candidate < vi {
                                vals[lin] = candidate;
                                let delta = vi - candidate;
                                if delta > max_change {
                                    max_change = delta;
                                }
                            }
                        }
                    }
                }
            }
        }
        residuals.push(max_change);
        if max_change < target {
            return Ok(residuals);
        }
    }
    Err(SolveError::NotConverged {
        residual: *residuals.last().unwrap_or(&f64::INFINITY),
        cycles: cfg.max_cycles,
    })
}

/// Greedy policy extraction: from `start`, repeatedly apply the reach
/// optimal control for the interpolated value gradient and integrate the
/// undisturbed dynamics until the goal disk is entered. Returns the
/// arrival time, or None when the state leaves the grid, hits an
/// unreachable plateau, or exceeds `max_time`.
pub fn rollout_to_goal(
    field: &ValueField,
    bounds: &DynamicsBounds,
    goal: &GoalSpec,
    start: &VehicleState,
    dt: f64,
    max_time: f64,
) -> Option<f64> {
    let mut z = *start;
    let mut t = 0.0;
    while t <= max_time {
        if goal.contains(z.x, z.y) {
            return Some(t);
        }
        let grad = interpolated_gradient(field, &z)?;
        let u = optimal_control(&grad, bounds, Mode::Reach);
        z = step(&z, &u, &Disturbance::ZERO, bounds, dt).ok()?;
        t += dt;
    }
    None
}

/// Gradient of the interpolant by central differences at ±h/4, falling
/// back to one-sided probes at domain edges. Uses the finite-corner
/// interpolation so the fringe cells around obstacles still yield a
/// usable direction.
pub fn interpolated_gradient(field: &ValueField, state: &VehicleState) -> Option<[f64; 4]> {
    let grid = field.grid();
    let here = field.interpolate_finite(state)?;
    let q = [state.x, state.y, state.v, state.phi];
    let mut grad = [0.0f64; 4];
    for d in 0..4 {
        let delta = grid.axis(d).spacing * 0.25;
        let probe = |offset: f64| -> Option<f64> {
            let mut s = *state;
            match d {
                0 => s.x = q[0] + offset,
                1 => s.y = q[1] + offset,
                2 => s.v = q[2] + offset,
                _ => s.phi = q[3] + offset,
            }
            field.interpolate_finite(&s)
        };
        grad[d] = match (probe(-delta), probe(delta)) {
            (Some(lo), Some(hi)) => (hi - lo) / (2.0 * delta),
            (Some(lo), None) => (here - lo) / delta,
            (None, Some(hi)) => (hi - here) / delta,
            (None, None) => 0.0,
        };
    }
    Some(grad)
}

/// Convenience: truncates a control to the admissible box. Re-exported
/// here because rollout consumers typically clamp before stepping.
pub fn clamp_control(u: ControlInput, bounds: &DynamicsBounds) -> ControlInput {
    u.clamped(bounds)
}
