//! Disturbed 4D unicycle model and its game-theoretic Hamiltonians.
//!
//! State (x, y, v, φ) evolves as ẋ = v cos φ + dₓ, ẏ = v sin φ + d_y,
//! v̇ = a, φ̇ = ω + d_φ, with box-bounded controls (a, ω), a disk bound on
//! (dₓ, d_y) and an interval bound on d_φ. The reach Hamiltonian takes
//! max over controls and min over disturbances of −∇V·f − 1; the avoid
//! Hamiltonian flips both optimizations. Both have closed-form optima
//! over these input sets, implemented here together with the optimizers
//! themselves and an RK4 propagator for simulation.

use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)] // resolves float methods in the no_std build
use num_traits::Float as _;

/// Wraps an angle to [−π, π).
pub fn wrap_angle(a: f64) -> f64 {
    a - 2.0 * PI * ((a + PI) / (2.0 * PI)).floor()
}

/// Sign with the tie `sign(0) = +1`, fixed so repeated runs and golden
/// files are stable.
fn sign_pos(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Vehicle state: position (m), speed (m/s), heading (rad in [−π, π)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    pub v: f64,
    pub phi: f64,
}

impl VehicleState {
    pub fn new(x: f64, y: f64, v: f64, phi: f64) -> Self {
        VehicleState { x, y, v, phi: wrap_angle(phi) }
    }

    /// Euclidean distance between this position and (x, y).
    pub fn distance_to(&self, x: f64, y: f64) -> f64 {
        (self.x - x).hypot(self.y - y)
    }
}

/// Control input: acceleration (m/s²) and turn rate (rad/s).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlInput {
    pub accel: f64,
    pub omega: f64,
}

impl ControlInput {
    pub const ZERO: ControlInput = ControlInput { accel: 0.0, omega: 0.0 };

    /// Clamps both components into the admissible box.
    pub fn clamped(self, bounds: &DynamicsBounds) -> Self {
        ControlInput {
            accel: self.accel.max(-bounds.accel_max).min(bounds.accel_max),
            omega: self.omega.max(-bounds.omega_max).min(bounds.omega_max),
        }
    }
}

/// Disturbance: velocity offset (m/s, disk-bounded) and turn-rate offset
/// (rad/s, interval-bounded).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disturbance {
    pub dx: f64,
    pub dy: f64,
    pub dphi: f64,
}

impl Disturbance {
    pub const ZERO: Disturbance = Disturbance { dx: 0.0, dy: 0.0, dphi: 0.0 };
}

/// Input bounds: v ∈ [0, v_max], |a| ≤ accel_max, |ω| ≤ omega_max,
/// dₓ² + d_y² ≤ dxy_max², |d_φ| ≤ dphi_max.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicsBounds {
    pub v_max: f64,
    pub accel_max: f64,
    pub omega_max: f64,
    pub dxy_max: f64,
    pub dphi_max: f64,
}

impl Default for DynamicsBounds {
    /// Turtlebot-class bounds: v̄ = 0.6 m/s, ā = 0.4 m/s², ω̄ = 1.1 rad/s,
    /// with disturbance bounds d̄ₓᵧ = 0.05 m/s and d̄_φ = 0.15 rad/s.
    fn default() -> Self {
        DynamicsBounds {
            v_max: 0.6,
            accel_max: 0.4,
            omega_max: 1.1,
            dxy_max: 0.05,
            dphi_max: 0.15,
        }
    }
}

impl DynamicsBounds {
    /// The same bounds with both disturbance magnitudes zeroed.
    pub fn without_disturbance(mut self) -> Self {
        self.dxy_max = 0.0;
        self.dphi_max = 0.0;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsError {
    ControlOutOfBounds { accel: f64, omega: f64 },
    DisturbanceOutOfBounds { dx: f64, dy: f64, dphi: f64 },
    NonPositiveStep { dt: f64 },
}

impl fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicsError::ControlOutOfBounds { accel, omega } => {
                write!(f, "control (a={accel}, omega={omega}) violates bounds")
            }
            DynamicsError::DisturbanceOutOfBounds { dx, dy, dphi } => {
                write!(f, "disturbance ({dx}, {dy}, {dphi}) violates bounds")
            }
            DynamicsError::NonPositiveStep { dt } => write!(f, "step dt={dt} must be positive"),
        }
    }
}

/// Which side of the differential game is being solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Goal reaching: control minimizes time, disturbance maximizes.
    Reach,
    /// Collision avoidance: control maximizes time, disturbance minimizes.
    Avoid,
}

// Relative slack on input validation so analytically-on-the-boundary
// inputs (e.g. the worst-case disturbance) survive rounding.
const BOUND_SLACK: f64 = 1.0 + 1e-9;

fn time_derivative(s: &VehicleState, u: &ControlInput, d: &Disturbance) -> [f64; 4] {
    [
        s.v * s.phi.cos() + d.dx,
        s.v * s.phi.sin() + d.dy,
        u.accel,
        u.omega + d.dphi,
    ]
}

/// Propagates the disturbed model by one RK4 step of length `dt`.
///
/// The speed constraint v ∈ [0, v_max] is applied as a projection after
/// the full step, and the heading is wrapped after the full step rather
/// than per stage.
pub fn step(
    state: &VehicleState,
    control: &ControlInput,
    disturbance: &Disturbance,
    bounds: &DynamicsBounds,
    dt: f64,
) -> Result<VehicleState, DynamicsError> {
    if dt <= 0.0 {
        return Err(DynamicsError::NonPositiveStep { dt });
    }
    if control.accel.abs() > bounds.accel_max * BOUND_SLACK
        || control.omega.abs() > bounds.omega_max * BOUND_SLACK
    {
        return Err(DynamicsError::ControlOutOfBounds {
            accel: control.accel,
            omega: control.omega,
        });
    }
    if disturbance.dx.hypot(disturbance.dy) > bounds.dxy_max * BOUND_SLACK + 1e-15
        || disturbance.dphi.abs() > bounds.dphi_max * BOUND_SLACK + 1e-15
    {
        return Err(DynamicsError::DisturbanceOutOfBounds {
            dx: disturbance.dx,
            dy: disturbance.dy,
            dphi: disturbance.dphi,
        });
    }

    let add = |s: &VehicleState, k: &[f64; 4], h: f64| VehicleState {
        x: s.x + h * k[0],
        y: s.y + h * k[1],
        v: s.v + h * k[2],
        phi: s.phi + h * k[3],
    };
    let k1 = time_derivative(state, control, disturbance);
    let k2 = time_derivative(&add(state, &k1, 0.5 * dt), control, disturbance);
    let k3 = time_derivative(&add(state, &k2, 0.5 * dt), control, disturbance);
    let k4 = time_derivative(&add(state, &k3, dt), control, disturbance);
    let mut next = VehicleState {
        x: state.x + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y: state.y + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        v: state.v + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        phi: state.phi + dt / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
    };
    next.v = next.v.max(0.0).min(bounds.v_max);
    next.phi = wrap_angle(next.phi);
    Ok(next)
}

/// One explicit-Euler step of the undisturbed model. This is the discrete
/// map the planner transcription and the LQR linearization use; the
/// simulator itself integrates with RK4. No clamping or wrapping, so the
/// map stays smooth for Jacobian checks.
pub fn euler_step(state: &VehicleState, control: &ControlInput, dt: f64) -> VehicleState {
    VehicleState {
        x: state.x + dt * state.v * state.phi.cos(),
        y: state.y + dt * state.v * state.phi.sin(),
        v: state.v + dt * control.accel,
        phi: state.phi + dt * control.omega,
    }
}

/// Optimized Hamiltonian −∇V·f(z, u*, d*) − 1 with the closed-form
/// optimal inputs substituted.
///
/// Reach: −Vₓ·v·cosφ − V_y·v·sinφ + ā|V_v| + ω̄|V_φ| − d̄ₓᵧ‖(Vₓ,V_y)‖ −
/// d̄_φ|V_φ| − 1. Avoid flips the sign of every optimized term.
pub fn hamiltonian(grad: &[f64; 4], state: &VehicleState, bounds: &DynamicsBounds, mode: Mode) -> f64 {
    let drift = -grad[0] * state.v * state.phi.cos() - grad[1] * state.v * state.phi.sin();
    let controlled = bounds.accel_max * grad[2].abs() + bounds.omega_max * grad[3].abs();
    let disturbed = bounds.dxy_max * grad[0].hypot(grad[1]) + bounds.dphi_max * grad[3].abs();
    match mode {
        Mode::Reach => drift + controlled - disturbed - 1.0,
        Mode::Avoid => drift - controlled + disturbed - 1.0,
    }
}

/// Control achieving the optimum inside [`hamiltonian`]. Bang-bang in
/// both components; gradient zeros resolve via `sign(0) = +1`.
pub fn optimal_control(grad: &[f64; 4], bounds: &DynamicsBounds, mode: Mode) -> ControlInput {
    let s = match mode {
        Mode::Reach => -1.0,
        Mode::Avoid => 1.0,
    };
    ControlInput {
        accel: s * bounds.accel_max * sign_pos(grad[2]),
        omega: s * bounds.omega_max * sign_pos(grad[3]),
    }
}

/// Disturbance achieving the optimum inside [`hamiltonian`]. The planar
/// part aligns with the value gradient (pushing the state up-gradient is
/// worst for reaching); a zero planar gradient yields a zero disturbance.
pub fn optimal_disturbance(grad: &[f64; 4], bounds: &DynamicsBounds, mode: Mode) -> Disturbance {
    let s = match mode {
        Mode::Reach => 1.0,
        Mode::Avoid => -1.0,
    };
    let norm = grad[0].hypot(grad[1]);
    let (dx, dy) = if norm > 0.0 {
        (s * bounds.dxy_max * grad[0] / norm, s * bounds.dxy_max * grad[1] / norm)
    } else {
        (0.0, 0.0)
    };
    Disturbance { dx, dy, dphi: s * bounds.dphi_max * sign_pos(grad[3]) }
}
