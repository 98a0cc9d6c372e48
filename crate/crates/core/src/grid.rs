//! Regular 4D grid over (x, y, v, φ) and scalar fields on it.
//!
//! The heading dimension is periodic on [−π, π); the other three are
//! bounded intervals. Fields store one `f64` per node in a fixed
//! row-major layout with x fastest, so serialized files are byte-stable.
//! Nodes that stand in for an infinite PDE boundary value carry a large
//! finite sentinel (`ValueField::unreachable`) instead of IEEE infinity,
//! which keeps cost sums finite and comparable.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

#[allow(unused_imports)] // resolves float methods in the no_std build
use num_traits::Float as _;

use crate::dynamics::{wrap_angle, VehicleState};

/// Default sentinel for nodes with no finite value (obstacles, enclosed
/// pockets). Any sum containing it exceeds any reachable sum.
pub const DEFAULT_UNREACHABLE: f64 = 1e6;

/// Dimension indices into the grid's axis array.
pub const DIM_X: usize = 0;
pub const DIM_Y: usize = 1;
pub const DIM_V: usize = 2;
pub const DIM_PHI: usize = 3;

/// One grid dimension: bounds, node count and derived spacing.
///
/// Non-periodic axes place `count` nodes on [min, max] inclusive; the
/// periodic heading axis places `count` nodes on [min, max) with the node
/// past the last wrapping back to the first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub periodic: bool,
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridError {
    /// Fewer than two nodes along a dimension.
    TooFewNodes { dim: usize, count: usize },
    /// Upper bound does not exceed the lower bound.
    EmptyRange { dim: usize },
    /// Periodic flag on a non-angular dimension.
    PeriodicNonAngular { dim: usize },
    /// The heading dimension must be periodic over exactly [−π, π).
    BadHeadingAxis { min: f64, max: f64, periodic: bool },
    /// The speed dimension must start at zero.
    BadSpeedAxis { min: f64 },
    /// Query outside the grid in a non-periodic dimension.
    OutOfDomain { dim: usize, value: f64 },
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::TooFewNodes { dim, count } => {
                write!(f, "dimension {dim} has {count} nodes, need at least 2")
            }
            GridError::EmptyRange { dim } => write!(f, "dimension {dim} has an empty range"),
            GridError::PeriodicNonAngular { dim } => {
                write!(f, "periodic flag on non-angular dimension {dim}")
            }
            GridError::BadHeadingAxis { min, max, periodic } => write!(
                f,
                "heading axis must be periodic over [-pi, pi), got [{min}, {max}) periodic={periodic}"
            ),
            GridError::BadSpeedAxis { min } => {
                write!(f, "speed axis must start at 0, got {min}")
            }
            GridError::OutOfDomain { dim, value } => {
                write!(f, "query {value} outside grid bounds in dimension {dim}")
            }
        }
    }
}

/// Regular grid over the vehicle state space (x, y, v, φ).
#[derive(Clone, Debug, PartialEq)]
pub struct Grid4D {
    axes: [Axis; 4],
}

impl Grid4D {
    /// Builds a grid from per-dimension bounds, node counts and periodic
    /// flags. Only the heading dimension may (and must) be periodic, over
    /// exactly [−π, π); the speed dimension must start at 0.
    pub fn new(
        bounds: [(f64, f64); 4],
        counts: [usize; 4],
        periodic: [bool; 4],
    ) -> Result<Self, GridError> {
        for dim in 0..4 {
            if counts[dim] < 2 {
                return Err(GridError::TooFewNodes { dim, count: counts[dim] });
            }
            if !(bounds[dim].1 > bounds[dim].0) {
                return Err(GridError::EmptyRange { dim });
            }
            if periodic[dim] && dim != DIM_PHI {
                return Err(GridError::PeriodicNonAngular { dim });
            }
        }
        let (phi_min, phi_max) = bounds[DIM_PHI];
        if !periodic[DIM_PHI] || (phi_min + PI).abs() > 1e-9 || (phi_max - PI).abs() > 1e-9 {
            return Err(GridError::BadHeadingAxis {
                min: phi_min,
                max: phi_max,
                periodic: periodic[DIM_PHI],
            });
        }
        if bounds[DIM_V].0 != 0.0 {
            return Err(GridError::BadSpeedAxis { min: bounds[DIM_V].0 });
        }
        let mut axes = [Axis { min: 0.0, max: 0.0, count: 0, periodic: false, spacing: 0.0 }; 4];
        for dim in 0..4 {
            let (min, max) = bounds[dim];
            let count = counts[dim];
            let intervals = if periodic[dim] { count } else { count - 1 };
            axes[dim] = Axis {
                min,
                max,
                count,
                periodic: periodic[dim],
                spacing: (max - min) / intervals as f64,
            };
        }
        Ok(Grid4D { axes })
    }

    pub fn axis(&self, dim: usize) -> &Axis {
        &self.axes[dim]
    }

    pub fn counts(&self) -> [usize; 4] {
        [0, 1, 2, 3].map(|d| self.axes[d].count)
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// World coordinate of node `i` along `dim`.
    pub fn coord(&self, dim: usize, i: usize) -> f64 {
        let a = &self.axes[dim];
        a.min + a.spacing * i as f64
    }

    /// Linear index of a node, row-major with x fastest.
    pub fn index(&self, idx: [usize; 4]) -> usize {
        let c = self.counts();
        ((idx[3] * c[2] + idx[2]) * c[1] + idx[1]) * c[0] + idx[0]
    }

    /// Inverse of [`Grid4D::index`].
    pub fn unindex(&self, mut lin: usize) -> [usize; 4] {
        let c = self.counts();
        let ix = lin % c[0];
        lin /= c[0];
        let iy = lin % c[1];
        lin /= c[1];
        let iv = lin % c[2];
        [ix, iy, iv, lin / c[2]]
    }

    /// Vehicle state at a grid node.
    pub fn node_state(&self, idx: [usize; 4]) -> VehicleState {
        VehicleState {
            x: self.coord(DIM_X, idx[0]),
            y: self.coord(DIM_Y, idx[1]),
            v: self.coord(DIM_V, idx[2]),
            phi: wrap_angle(self.coord(DIM_PHI, idx[3])),
        }
    }

    /// Locates `q` along `dim`: lower node index and fraction in [0, 1].
    /// The heading wraps; other dimensions must be inside their bounds.
    fn locate(&self, dim: usize, q: f64) -> Result<(usize, f64), GridError> {
        let a = &self.axes[dim];
        if a.periodic {
            let wrapped = wrap_angle(q);
            let t = (wrapped - a.min) / a.spacing;
            let i = (t.floor() as usize).min(a.count - 1);
            return Ok((i, t - i as f64));
        }
        if q < a.min || q > a.max {
            return Err(GridError::OutOfDomain { dim, value: q });
        }
        let t = (q - a.min) / a.spacing;
        let i = (t.floor() as usize).min(a.count - 2);
        Ok((i, t - i as f64))
    }

    /// Index of the neighbor of `i` in the +direction along `dim`,
    /// wrapping on the periodic axis.
    pub fn next_node(&self, dim: usize, i: usize) -> usize {
        let a = &self.axes[dim];
        if a.periodic {
            (i + 1) % a.count
        } else {
            i + 1
        }
    }
}

/// What a field's values mean.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    /// Time to reach the goal set (seconds).
    Ttr,
    /// Time to collision with the obstacle set (seconds), capped.
    Ttc,
    /// Planner cost (unitless combination of times).
    Cost,
}

/// Scalar field over a [`Grid4D`], one value per node.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueField {
    grid: Grid4D,
    kind: FieldKind,
    unreachable: f64,
    values: Vec<f64>,
}

impl ValueField {
    /// A field with every node set to `fill`.
    pub fn filled(grid: Grid4D, kind: FieldKind, fill: f64, unreachable: f64) -> Self {
        let n = grid.len();
        ValueField { grid, kind, unreachable, values: vec![fill; n] }
    }

    /// Rebuilds a field from raw parts; `values` must match the grid's
    /// fixed layout and length.
    pub fn from_raw(
        grid: Grid4D,
        kind: FieldKind,
        unreachable: f64,
        values: Vec<f64>,
    ) -> Option<Self> {
        (values.len() == grid.len()).then_some(ValueField { grid, kind, unreachable, values })
    }

    pub fn grid(&self) -> &Grid4D {
        &self.grid
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn set_kind(&mut self, kind: FieldKind) {
        self.kind = kind;
    }

    /// The finite sentinel standing in for an infinite value.
    pub fn unreachable(&self) -> f64 {
        self.unreachable
    }

    /// True if `v` is at or beyond the sentinel.
    pub fn is_unreachable(&self, v: f64) -> bool {
        v >= self.unreachable
    }

    /// Raw node values in the fixed layout (x fastest).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, idx: [usize; 4]) -> f64 {
        self.values[self.grid.index(idx)]
    }

    pub fn set(&mut self, idx: [usize; 4], v: f64) {
        let i = self.grid.index(idx);
        self.values[i] = v;
    }

    /// Multilinear interpolation over the 2⁴ nodes surrounding `state`.
    ///
    /// If any surrounding node is unreachable the sentinel is returned
    /// unblended: averaging a 10⁶ stand-in into a cell would poison it by
    /// an arbitrary amount, so propagation is all-or-nothing.
    pub fn interpolate(&self, state: &VehicleState) -> Result<f64, GridError> {
        let q = [state.x, state.y, state.v, state.phi];
        let mut base = [0usize; 4];
        let mut frac = [0f64; 4];
        for dim in 0..4 {
            let (i, f) = self.grid.locate(dim, q[dim])?;
            base[dim] = i;
            frac[dim] = f;
        }
        let mut acc = 0.0;
        for corner in 0..16usize {
            let mut idx = [0usize; 4];
            let mut w = 1.0;
            for dim in 0..4 {
                if corner & (1 << dim) != 0 {
                    idx[dim] = self.grid.next_node(dim, base[dim]);
                    w *= frac[dim];
                } else {
                    idx[dim] = base[dim];
                    w *= 1.0 - frac[dim];
                }
            }
            let v = self.get(idx);
            if self.is_unreachable(v) {
                return Ok(self.unreachable);
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// Multilinear interpolation over the finite corners only, with the
    /// weights renormalized. Inside the fringe cells around obstacles the
    /// conservative [`ValueField::interpolate`] returns the sentinel;
    /// this variant still recovers a local estimate there, which gradient
    /// probes and visualization need. Returns None out of domain or when
    /// every corner is unreachable.
    pub fn interpolate_finite(&self, state: &VehicleState) -> Option<f64> {
        let q = [state.x, state.y, state.v, state.phi];
        let mut base = [0usize; 4];
        let mut frac = [0f64; 4];
        for dim in 0..4 {
            let (i, f) = self.grid.locate(dim, q[dim]).ok()?;
            base[dim] = i;
            frac[dim] = f;
        }
        let mut acc = 0.0;
        let mut total = 0.0;
        for corner in 0..16usize {
            let mut idx = [0usize; 4];
            let mut w = 1.0;
            for dim in 0..4 {
                if corner & (1 << dim) != 0 {
                    idx[dim] = self.grid.next_node(dim, base[dim]);
                    w *= frac[dim];
                } else {
                    idx[dim] = base[dim];
                    w *= 1.0 - frac[dim];
                }
            }
            let v = self.get(idx);
            if !self.is_unreachable(v) {
                acc += w * v;
                total += w;
            }
        }
        (total > 1e-12).then(|| acc / total)
    }

    /// Finite-difference gradient at a node: central in the interior,
    /// one-sided at non-periodic boundaries, wrapped central in φ.
    pub fn gradient(&self, idx: [usize; 4]) -> [f64; 4] {
        let mut g = [0f64; 4];
        for dim in 0..4 {
            let a = self.grid.axis(dim);
            let i = idx[dim];
            let at = |j: usize| {
                let mut n = idx;
                n[dim] = j;
                self.get(n)
            };
            g[dim] = if a.periodic {
                let plus = (i + 1) % a.count;
                let minus = (i + a.count - 1) % a.count;
                (at(plus) - at(minus)) / (2.0 * a.spacing)
            } else if i == 0 {
                (at(1) - at(0)) / a.spacing
            } else if i == a.count - 1 {
                (at(i) - at(i - 1)) / a.spacing
            } else {
                (at(i + 1) - at(i - 1)) / (2.0 * a.spacing)
            };
        }
        g
    }
}
