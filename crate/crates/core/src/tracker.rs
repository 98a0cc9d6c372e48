//! Finite-horizon LQR tracking of a planned spline.
//!
//! The reference trajectory is linearized about each sample with the
//! same explicit-Euler map the planner transcription uses; a backward
//! Riccati recursion yields time-varying feedback gains; the tracking
//! law u = u_ref + K·(z_ref − z) wraps the heading error and saturates
//! at the control bounds. The simulator integrates with RK4, so model
//! mismatch between planning and execution is part of the setup, as on
//! a real platform.

use alloc::vec::Vec;
use core::fmt;

use nalgebra::{SMatrix, SVector};
#[allow(unused_imports)] // resolves float methods in the no_std build
use num_traits::Float as _;

use crate::dynamics::{wrap_angle, ControlInput, DynamicsBounds, VehicleState};
use crate::planner::SplineTrajectory;

pub type StateMat = SMatrix<f64, 4, 4>;
pub type InputMat = SMatrix<f64, 4, 2>;
pub type GainMat = SMatrix<f64, 2, 4>;
pub type WeightR = SMatrix<f64, 2, 2>;

/// LQR weight matrices: Q penalizes state deviation (PSD), R control
/// effort (PD).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LqrWeights {
    pub q: StateMat,
    pub r: WeightR,
}

impl Default for LqrWeights {
    fn default() -> Self {
        LqrWeights {
            q: StateMat::from_diagonal(&SVector::<f64, 4>::new(1.0, 1.0, 0.1, 0.5)),
            r: WeightR::from_diagonal(&SVector::<f64, 2>::new(0.1, 0.1)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrackError {
    EmptyHorizon,
    LengthMismatch { a: usize, b: usize },
    /// R is not positive definite.
    RNotPositiveDefinite,
    /// Q is not symmetric positive semidefinite.
    QNotPsd,
}

impl fmt::Display for TrackError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrackError::EmptyHorizon => write!(f, "empty linearization horizon"),
            TrackError::LengthMismatch { a, b } => {
                write!(f, "A sequence has {a} entries but B has {b}")
            }
            TrackError::RNotPositiveDefinite => write!(f, "R must be positive definite"),
            TrackError::QNotPsd => write!(f, "Q must be symmetric positive semidefinite"),
        }
    }
}

/// Jacobians of the discrete Euler map about each reference sample:
/// one (A, B) pair per step i = 0..N−1.
pub fn linearize(traj: &SplineTrajectory, dt: f64) -> (Vec<StateMat>, Vec<InputMat>) {
    let n = traj.states.len().saturating_sub(1);
    let mut a_seq = Vec::with_capacity(n);
    let mut b_seq = Vec::with_capacity(n);
    for z in traj.states.iter().take(n) {
        let (s, c) = z.phi.sin_cos();
        #[rustfmt::skip]
        let a = StateMat::new(
            1.0, 0.0, dt * c, -dt * z.v * s,
            0.0, 1.0, dt * s, dt * z.v * c,
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
        );
        #[rustfmt::skip]
        let b = InputMat::new(
            0.0, 0.0,
            0.0, 0.0,
            dt, 0.0,
            0.0, dt,
        );
        a_seq.push(a);
        b_seq.push(b);
    }
    (a_seq, b_seq)
}

/// Feedback gains and Riccati cost-to-go matrices for one horizon.
#[derive(Clone, Debug)]
pub struct LqrSolution<const NX: usize, const NU: usize> {
    /// K_i for i = 0..N−1.
    pub feedback: Vec<SMatrix<f64, NU, NX>>,
    /// P_i for i = 0..N (terminal cost = Q).
    pub cost_to_go: Vec<SMatrix<f64, NX, NX>>,
}

/// Backward Riccati recursion with terminal cost Q. Cost-to-go matrices
/// are re-symmetrized every step to keep them PSD under roundoff.
pub fn solve_lqr<const NX: usize, const NU: usize>(
    a_seq: &[SMatrix<f64, NX, NX>],
    b_seq: &[SMatrix<f64, NX, NU>],
    q: &SMatrix<f64, NX, NX>,
    r: &SMatrix<f64, NU, NU>,
) -> Result<LqrSolution<NX, NU>, TrackError> {
    if a_seq.is_empty() {
        return Err(TrackError::EmptyHorizon);
    }
    if a_seq.len() != b_seq.len() {
        return Err(TrackError::LengthMismatch { a: a_seq.len(), b: b_seq.len() });
    }
    if nalgebra::Cholesky::new(*r).is_none() {
        return Err(TrackError::RNotPositiveDefinite);
    }
    // PSD check via Cholesky of Q + eps*I (works for any const size)
    if (q - q.transpose()).abs().max() > 1e-9
        || nalgebra::Cholesky::new(q + SMatrix::identity() * 1e-10).is_none()
    {
        return Err(TrackError::QNotPsd);
    }

    let n = a_seq.len();
    let mut feedback = Vec::with_capacity(n);
    let mut cost_to_go = Vec::with_capacity(n + 1);
    let mut p = *q;
    cost_to_go.push(p);
    for i in (0..n).rev() {
        let a = &a_seq[i];
        let b = &b_seq[i];
        let s = r + b.transpose() * p * b;
        let chol = nalgebra::Cholesky::new(s).ok_or(TrackError::RNotPositiveDefinite)?;
        let k = chol.solve(&(b.transpose() * p * a));
        let closed = a - b * k;
        p = q + k.transpose() * r * k + closed.transpose() * p * closed;
        p = (p + p.transpose()) * 0.5;
        feedback.push(k);
        cost_to_go.push(p);
    }
    feedback.reverse();
    cost_to_go.reverse();
    Ok(LqrSolution { feedback, cost_to_go })
}

/// Gains bound to a reference trajectory: feedback from the Riccati
/// recursion plus the reference controls as feedforward.
#[derive(Clone, Debug)]
pub struct LqrGains {
    pub feedback: Vec<GainMat>,
    pub feedforward: Vec<ControlInput>,
    pub cost_to_go: Vec<StateMat>,
    pub weights: LqrWeights,
}

/// Linearizes `traj` and solves the tracking LQR in one call.
pub fn gains_for_trajectory(
    traj: &SplineTrajectory,
    weights: &LqrWeights,
) -> Result<LqrGains, TrackError> {
    let (a_seq, b_seq) = linearize(traj, traj.dt);
    let sol = solve_lqr(&a_seq, &b_seq, &weights.q, &weights.r)?;
    Ok(LqrGains {
        feedback: sol.feedback,
        feedforward: traj.controls[..traj.controls.len() - 1].to_vec(),
        cost_to_go: sol.cost_to_go,
        weights: *weights,
    })
}

/// Tracking law u = u_ref + K·(z_ref − z) with the heading error wrapped
/// to [−π, π), saturated at the control bounds.
pub fn track_step(
    state: &VehicleState,
    reference_state: &VehicleState,
    reference_control: &ControlInput,
    gain: &GainMat,
    bounds: &DynamicsBounds,
) -> ControlInput {
    let e = SVector::<f64, 4>::new(
        reference_state.x - state.x,
        reference_state.y - state.y,
        reference_state.v - state.v,
        wrap_angle(reference_state.phi - state.phi),
    );
    let du = gain * e;
    ControlInput {
        accel: reference_control.accel + du[0],
        omega: reference_control.omega + du[1],
    }
    .clamped(bounds)
}
