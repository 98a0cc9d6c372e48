//! Robust navigation value functions and waypoint planning for a 4D unicycle.
//!
//! The crate computes disturbance-robust time-to-reach (TTR) and
//! time-to-collision (TTC) value functions on a regular 4D grid over
//! (x, y, v, φ) by Lax–Friedrichs fast sweeping, combines them into cost
//! maps, and plans dynamically feasible spline trajectories to sampled
//! waypoints under a receding-horizon scheme tracked by a finite-horizon
//! LQR controller. An episode runner benchmarks the planner on synthetic
//! occupancy maps and emits supervision records (occupancy crop, speeds,
//! waypoint label) for downstream learners.
//!
//! The crate is `no_std` (with `alloc`); all file formats, caching and the
//! command-line front end live in the companion `reachnav` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cost;
pub mod dynamics;
pub mod grid;
pub mod map;
pub mod planner;
pub mod sim;
pub mod solver;
pub mod tracker;

pub use dynamics::{ControlInput, Disturbance, DynamicsBounds, VehicleState};
pub use grid::{FieldKind, Grid4D, ValueField};
pub use map::OccupancyMap;
pub use solver::GoalSpec;
