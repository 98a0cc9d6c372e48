//! Planner cost maps: the reachability combination J = TTR + α(T̄ − TTC)
//! and the distance-based heuristic baseline (max{0, λ₁ − d_obs})³ +
//! λ₂·d_goal².
//!
//! The obstacle distance field is an exact Euclidean distance transform
//! over cell centers; the goal distance is geodesic (obstacle-respecting),
//! computed by Dijkstra over the free cells, so the baseline routes
//! around walls instead of rewarding straight-line shortcuts through
//! them. The heuristic cost is position-only and therefore kept as a 2D
//! field broadcast over the speed and heading dimensions, never
//! materialized in 4D.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

#[allow(unused_imports)] // resolves float methods in the no_std build
use num_traits::Float as _;

use crate::dynamics::VehicleState;
use crate::grid::{FieldKind, GridError, ValueField, DEFAULT_UNREACHABLE};
use crate::map::OccupancyMap;
use crate::solver::GoalSpec;

#[derive(Debug, Clone, PartialEq)]
pub enum CostError {
    /// Inputs live on different grids.
    GridMismatch,
    /// A TTC field exceeds the stated cap.
    TtcExceedsCap { max: f64, cap: f64 },
    /// The goal disk covers no free cell.
    GoalInObstacle,
    BadParams(&'static str),
    Grid(GridError),
}

impl fmt::Display for CostError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostError::GridMismatch => write!(f, "fields live on different grids"),
            CostError::TtcExceedsCap { max, cap } => {
                write!(f, "TTC field max {max} exceeds cap {cap}")
            }
            CostError::GoalInObstacle => write!(f, "goal disk covers no free cell"),
            CostError::BadParams(why) => write!(f, "bad cost parameters: {why}"),
            CostError::Grid(e) => write!(f, "grid error: {e}"),
        }
    }
}

impl From<GridError> for CostError {
    fn from(e: GridError) -> Self {
        CostError::Grid(e)
    }
}

/// Scalar field over the cells of an occupancy map, one value per cell
/// center.
#[derive(Clone, Debug, PartialEq)]
pub struct Field2D {
    width: usize,
    height: usize,
    cell_size: f64,
    origin: (f64, f64),
    values: Vec<f64>,
}

impl Field2D {
    pub fn filled(map: &OccupancyMap, fill: f64) -> Self {
        Field2D {
            width: map.width(),
            height: map.height(),
            cell_size: map.cell_size(),
            origin: map.origin(),
            values: vec![fill; map.width() * map.height()],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.width + ix]
    }

    pub fn set(&mut self, ix: usize, iy: usize, v: f64) {
        self.values[iy * self.width + ix] = v;
    }

    fn same_shape(&self, other: &Field2D) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.cell_size == other.cell_size
            && self.origin == other.origin
    }

    /// Bilinear sample over cell centers, clamped to the center lattice at
    /// the edges. When `sentinel` is finite, any participating corner at
    /// or above it makes the sample return the sentinel unblended.
    pub fn sample(&self, x: f64, y: f64, sentinel: f64) -> f64 {
        let tx = ((x - self.origin.0) / self.cell_size - 0.5)
            .max(0.0)
            .min((self.width - 1) as f64 - 1e-9);
        let ty = ((y - self.origin.1) / self.cell_size - 0.5)
            .max(0.0)
            .min((self.height - 1) as f64 - 1e-9);
        let ix = tx.floor() as usize;
        let iy = ty.floor() as usize;
        let fx = tx - ix as f64;
        let fy = ty - iy as f64;
        let mut acc = 0.0;
        for (dx, dy, w) in [
            (0, 0, (1.0 - fx) * (1.0 - fy)),
            (1, 0, fx * (1.0 - fy)),
            (0, 1, (1.0 - fx) * fy),
            (1, 1, fx * fy),
        ] {
            let v = self.get(ix + dx, iy + dy);
            if v >= sentinel {
                return sentinel;
            }
            acc += w * v;
        }
        acc
    }
}

/// What a distance field measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceKind {
    /// Euclidean distance to the nearest occupied cell.
    ObstacleDist,
    /// Geodesic distance through free space to the goal disk.
    GoalDist,
}

/// 2D distance field over the map plane (meters), zero exactly on the
/// generating set.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceField {
    pub kind: DistanceKind,
    pub field: Field2D,
}

/// Computes a distance field over the map cells.
///
/// `ObstacleDist` is the exact Euclidean distance transform between cell
/// centers. `GoalDist` needs `goal` and is the 8-connected Dijkstra
/// geodesic from the free cells inside the goal disk, with √2-weighted
/// diagonals that are blocked when either adjacent orthogonal cell is
/// occupied (no corner cutting); occupied or unconnected cells carry the
/// unreachable sentinel.
pub fn distance_transform(
    map: &OccupancyMap,
    kind: DistanceKind,
    goal: Option<&GoalSpec>,
) -> Result<DistanceField, CostError> {
    match kind {
        DistanceKind::ObstacleDist => Ok(DistanceField { kind, field: euclidean_transform(map) }),
        DistanceKind::GoalDist => {
            let goal = goal.ok_or(CostError::BadParams("goal distance needs a goal"))?;
            Ok(DistanceField { kind, field: geodesic_to_goal(map, goal)? })
        }
    }
}

/// Exact squared-parabola EDT (two 1D passes over rows and columns).
fn euclidean_transform(map: &OccupancyMap) -> Field2D {
    let (w, h) = (map.width(), map.height());
    let inf = f64::MAX / 4.0;
    // squared distance along each column
    let mut colsq = vec![inf; w * h];
    for ix in 0..w {
        let mut f: Vec<f64> = (0..h)
            .map(|iy| if map.is_occupied(ix, iy) { 0.0 } else { inf })
            .collect();
        f = squared_edt_1d(&f);
        for (iy, v) in f.iter().enumerate() {
            colsq[iy * w + ix] = *v;
        }
    }
    let mut out = Field2D::filled(map, 0.0);
    for iy in 0..h {
        let row: Vec<f64> = (0..w).map(|ix| colsq[iy * w + ix]).collect();
        let d = squared_edt_1d(&row);
        for (ix, v) in d.iter().enumerate() {
            out.set(ix, iy, v.sqrt() * map.cell_size());
        }
    }
    out
}

/// 1D squared distance transform D[j] = min_i f[i] + (j−i)² via the
/// lower-envelope-of-parabolas construction.
fn squared_edt_1d(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    z[0] = f64::MIN / 4.0;
    z[1] = f64::MAX / 4.0;
    for q in 1..n {
        if f[q] >= f64::MAX / 8.0 {
            continue;
        }
        let sect = |p: usize, q: usize| -> f64 {
            ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * q as f64 - 2.0 * p as f64)
        };
        let mut s = sect(v[k], q);
        while s <= z[k] {
            k -= 1;
            s = sect(v[k], q);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::MAX / 4.0;
    }
    // first parabola may itself be at infinity (row with no sites)
    if f[v[0]] >= f64::MAX / 8.0 && k == 0 {
        return vec![f64::MAX / 4.0; n];
    }
    let mut k = 0usize;
    let mut out = vec![0.0f64; n];
    for q in 0..n {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let dq = q as f64 - v[k] as f64;
        out[q] = f[v[k]] + dq * dq;
    }
    out
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    cell: (usize, usize),
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance; distances are never NaN
        other.dist.partial_cmp(&self.dist).unwrap_or(Ordering::Equal)
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn geodesic_to_goal(map: &OccupancyMap, goal: &GoalSpec) -> Result<Field2D, CostError> {
    let (w, h) = (map.width(), map.height());
    let mut out = Field2D::filled(map, DEFAULT_UNREACHABLE);
    let mut heap = BinaryHeap::new();
    let mut seeded = false;
    for iy in 0..h {
        for ix in 0..w {
            if map.is_occupied(ix, iy) {
                continue;
            }
            let (cx, cy) = map.cell_center(ix, iy);
            if goal.contains(cx, cy) {
                out.set(ix, iy, 0.0);
                heap.push(HeapEntry { dist: 0.0, cell: (ix, iy) });
                seeded = true;
            }
        }
    }
    if !seeded {
        return Err(CostError::GoalInObstacle);
    }
    let cell = map.cell_size();
    let diag = cell * 2.0f64.sqrt();
    while let Some(HeapEntry { dist, cell: (ix, iy) }) = heap.pop() {
        if dist > out.get(ix, iy) {
            continue;
        }
        let mut relax = |nx: i64, ny: i64, weight: f64, heap: &mut BinaryHeap<HeapEntry>| {
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                return;
            }
            let (nx, ny) = (nx as usize, ny as usize);
            if map.is_occupied(nx, ny) {
                return;
            }
            let nd = dist + weight;
            if nd < out.get(nx, ny) {
                out.set(nx, ny, nd);
                heap.push(HeapEntry { dist: nd, cell: (nx, ny) });
            }
        };
        let (x, y) = (ix as i64, iy as i64);
        relax(x - 1, y, cell, &mut heap);
        relax(x + 1, y, cell, &mut heap);
        relax(x, y - 1, cell, &mut heap);
        relax(x, y + 1, cell, &mut heap);
        for (dx, dy) in [(-1i64, -1i64), (-1, 1), (1, -1), (1, 1)] {
            // diagonal moves must not cut an occupied corner
            let ox = (x + dx) as usize;
            let oy = (y + dy) as usize;
            if ox < w && oy < h && !map.is_occupied(ox, iy) && !map.is_occupied(ix, oy) {
                relax(x + dx, y + dy, diag, &mut heap);
            }
        }
    }
    Ok(out)
}

/// Cost-map provenance and its parameter snapshot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CostParams {
    Reachability { alpha: f64, ttc_cap: f64 },
    Heuristic { lambda1: f64, lambda2: f64 },
}

/// Which cost family a map came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostKind {
    Reachability,
    Heuristic,
}

#[derive(Clone, Debug)]
enum CostRepr {
    /// Full 4D field.
    Volume(ValueField),
    /// Position-only cost broadcast over speed and heading.
    Planar(Field2D),
}

/// Cost consumed by the waypoint planner: either a 4D field or a 2D
/// broadcast, with a shared unreachable sentinel. Off-map queries return
/// the sentinel, so the planner disqualifies trajectories that leave the
/// world.
#[derive(Clone, Debug)]
pub struct CostMap {
    params: CostParams,
    repr: CostRepr,
    unreachable: f64,
}

impl CostMap {
    pub fn params(&self) -> CostParams {
        self.params
    }

    pub fn kind(&self) -> CostKind {
        match self.params {
            CostParams::Reachability { .. } => CostKind::Reachability,
            CostParams::Heuristic { .. } => CostKind::Heuristic,
        }
    }

    pub fn unreachable(&self) -> f64 {
        self.unreachable
    }

    pub fn is_unreachable(&self, v: f64) -> bool {
        v >= self.unreachable
    }

    /// Cost at a state; the sentinel for off-map or unreachable samples.
    pub fn value_at(&self, state: &VehicleState) -> f64 {
        match &self.repr {
            CostRepr::Volume(field) => field.interpolate(state).unwrap_or(self.unreachable),
            CostRepr::Planar(field) => field.sample(state.x, state.y, self.unreachable),
        }
    }

    /// The 4D field, when this map is volumetric.
    pub fn as_volume(&self) -> Option<&ValueField> {
        match &self.repr {
            CostRepr::Volume(f) => Some(f),
            CostRepr::Planar(_) => None,
        }
    }

    /// The 2D broadcast field, when this map is planar.
    pub fn as_planar(&self) -> Option<&Field2D> {
        match &self.repr {
            CostRepr::Volume(_) => None,
            CostRepr::Planar(f) => Some(f),
        }
    }
}

/// Node-wise J = TTR + α(T̄ − TTC). Unreachable TTR propagates to an
/// unreachable cost.
pub fn reachability_cost(
    ttr: &ValueField,
    ttc: &ValueField,
    alpha: f64,
    ttc_cap: f64,
) -> Result<CostMap, CostError> {
    if ttr.grid() != ttc.grid() {
        return Err(CostError::GridMismatch);
    }
    if alpha < 0.0 {
        return Err(CostError::BadParams("alpha must be nonnegative"));
    }
    let max_ttc = ttc.values().iter().cloned().fold(0.0, f64::max);
    if max_ttc > ttc_cap * (1.0 + 1e-9) {
        return Err(CostError::TtcExceedsCap { max: max_ttc, cap: ttc_cap });
    }
    let unreachable = ttr.unreachable();
    let mut field = ValueField::filled(ttr.grid().clone(), FieldKind::Cost, 0.0, unreachable);
    for lin in 0..field.values().len() {
        let t = ttr.values()[lin];
        field.values_mut()[lin] = if t >= unreachable {
            unreachable
        } else {
            t + alpha * (ttc_cap - ttc.values()[lin])
        };
    }
    Ok(CostMap {
        params: CostParams::Reachability { alpha, ttc_cap },
        repr: CostRepr::Volume(field),
        unreachable,
    })
}

/// The distance-based baseline (max{0, λ₁ − d_obs})³ + λ₂·d_goal²,
/// position-only. Cells the goal geodesic never reached (occupied or
/// walled off) carry the sentinel.
pub fn heuristic_cost(
    d_obs: &DistanceField,
    d_goal: &DistanceField,
    lambda1: f64,
    lambda2: f64,
) -> Result<CostMap, CostError> {
    if d_obs.kind != DistanceKind::ObstacleDist || d_goal.kind != DistanceKind::GoalDist {
        return Err(CostError::BadParams("fields passed in the wrong roles"));
    }
    if !d_obs.field.same_shape(&d_goal.field) {
        return Err(CostError::GridMismatch);
    }
    if lambda1 <= 0.0 || lambda2 <= 0.0 {
        return Err(CostError::BadParams("lambda weights must be positive"));
    }
    let unreachable = DEFAULT_UNREACHABLE;
    let mut field = d_obs.field.clone();
    for iy in 0..field.height() {
        for ix in 0..field.width() {
            let dg = d_goal.field.get(ix, iy);
            let cost = if dg >= unreachable {
                unreachable
            } else {
                let prox = (lambda1 - d_obs.field.get(ix, iy)).max(0.0);
                prox * prox * prox + lambda2 * dg * dg
            };
            field.set(ix, iy, cost);
        }
    }
    Ok(CostMap {
        params: CostParams::Heuristic { lambda1, lambda2 },
        repr: CostRepr::Planar(field),
        unreachable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid4D;
    use approx::assert_relative_eq;
    use core::f64::consts::PI;

    fn tiny_grid() -> Grid4D {
        Grid4D::new(
            [(0.0, 1.0), (0.0, 1.0), (0.0, 0.6), (-PI, PI)],
            [3, 3, 2, 4],
            [false, false, false, true],
        )
        .unwrap()
    }

    #[test]
    fn edt_matches_brute_force() {
        let art = "########\n#......#\n#..##..#\n#..#...#\n#......#\n########";
        let map = OccupancyMap::from_ascii(art, 0.5, (0.0, 0.0)).unwrap();
        let d = distance_transform(&map, DistanceKind::ObstacleDist, None).unwrap();
        for iy in 0..map.height() {
            for ix in 0..map.width() {
                let mut best = f64::MAX;
                for oy in 0..map.height() {
                    for ox in 0..map.width() {
                        if map.is_occupied(ox, oy) {
                            let dx = (ix as f64 - ox as f64) * 0.5;
                            let dy = (iy as f64 - oy as f64) * 0.5;
                            best = best.min(dx.hypot(dy));
                        }
                    }
                }
                assert_relative_eq!(d.field.get(ix, iy), best, epsilon = 1e-9);
                if map.is_occupied(ix, iy) {
                    assert_eq!(d.field.get(ix, iy), 0.0);
                }
            }
        }
    }

    #[test]
    fn goal_distance_euclidean_reduction() {
        // empty map, goal disk radius 0.3: a cell 2 m from the center on
        // the same row is 1.7 m from the disk boundary, up to the cell
        // quantization of the disk edge
        let map = OccupancyMap::empty(60, 20, 0.1, (0.0, 0.0)).unwrap();
        let goal = GoalSpec::new(1.05, 1.05, 0.3);
        let d = distance_transform(&map, DistanceKind::GoalDist, Some(&goal)).unwrap();
        let cell = map.cell_at(3.05, 1.05).unwrap();
        let got = d.field.get(cell.0, cell.1);
        assert!((got - 1.7).abs() <= 0.1 + 1e-9, "goal distance {got} vs 1.7");
        // inside the disk the distance is zero
        let seed = map.cell_at(1.05, 1.05).unwrap();
        assert_eq!(d.field.get(seed.0, seed.1), 0.0);
    }

    #[test]
    fn goal_distance_routes_around_walls() {
        // vertical wall with its top corner arranged so both legs of the
        // shortest path run at exactly 45 deg, where the 8-connected
        // metric is exact: start (0.55,0.55), corner (2.05,2.05), goal
        // cell (3.55,0.55); true length 2 * 1.5 * sqrt(2)
        let mut map = OccupancyMap::empty(50, 40, 0.1, (0.0, 0.0)).unwrap();
        for iy in 0..20 {
            map.set(20, iy, true); // wall x = 2.0..2.1, y 0..2.0
        }
        let goal = GoalSpec::new(0.55, 0.55, 0.05);
        let d = distance_transform(&map, DistanceKind::GoalDist, Some(&goal)).unwrap();
        let target = map.cell_at(3.55, 0.55).unwrap();
        let expect = 2.0 * 1.5 * 2.0f64.sqrt();
        let got = d.field.get(target.0, target.1);
        assert!(
            (got - expect).abs() / expect < 0.05,
            "geodesic {got} deviates more than 5% from the around-the-wall length {expect}"
        );
        // straight-line distance would be 3.0; the wall forces a detour
        assert!(got > 3.5);
        let in_wall = (20usize, 5usize);
        assert!(d.field.get(in_wall.0, in_wall.1) >= DEFAULT_UNREACHABLE);
    }

    #[test]
    fn goal_in_obstacle_is_rejected() {
        let map = OccupancyMap::empty(20, 20, 0.1, (0.0, 0.0)).unwrap();
        let goal = GoalSpec::new(0.05, 0.05, 0.02); // inside the border ring
        assert!(matches!(
            distance_transform(&map, DistanceKind::GoalDist, Some(&goal)),
            Err(CostError::GoalInObstacle)
        ));
    }

    #[test]
    fn reachability_cost_combination() {
        let g = tiny_grid();
        let mut ttr = ValueField::filled(g.clone(), FieldKind::Ttr, 5.0, DEFAULT_UNREACHABLE);
        let ttc = ValueField::filled(g.clone(), FieldKind::Ttc, 3.0, DEFAULT_UNREACHABLE);
        ttr.set([0, 0, 0, 0], DEFAULT_UNREACHABLE);
        let cost = reachability_cost(&ttr, &ttc, 30.0, 4.0).unwrap();
        let vol = cost.as_volume().unwrap();
        // alpha = 30, TTR = 5, TTC = 3, cap = 4 -> J = 5 + 30 = 35
        assert_relative_eq!(vol.get([1, 1, 1, 1]), 35.0);
        // unreachable TTR propagates
        assert_eq!(vol.get([0, 0, 0, 0]), DEFAULT_UNREACHABLE);
        assert_eq!(cost.kind(), CostKind::Reachability);
    }

    #[test]
    fn reachability_cost_is_affine_in_alpha() {
        let g = tiny_grid();
        let mut ttr = ValueField::filled(g.clone(), FieldKind::Ttr, 2.0, DEFAULT_UNREACHABLE);
        let mut ttc = ValueField::filled(g.clone(), FieldKind::Ttc, 1.0, DEFAULT_UNREACHABLE);
        for lin in 0..g.len() {
            ttr.values_mut()[lin] = 1.0 + (lin % 7) as f64;
            ttc.values_mut()[lin] = (lin % 5) as f64 * 0.8;
        }
        let j1 = reachability_cost(&ttr, &ttc, 15.0, 4.0).unwrap();
        let j2 = reachability_cost(&ttr, &ttc, 30.0, 4.0).unwrap();
        for lin in 0..g.len() {
            let t = ttr.values()[lin];
            let a = j1.as_volume().unwrap().values()[lin] - t;
            let b = j2.as_volume().unwrap().values()[lin] - t;
            assert_relative_eq!(2.0 * a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn reachability_cost_validates_inputs() {
        let g = tiny_grid();
        let ttr = ValueField::filled(g.clone(), FieldKind::Ttr, 5.0, DEFAULT_UNREACHABLE);
        let ttc = ValueField::filled(g.clone(), FieldKind::Ttc, 5.0, DEFAULT_UNREACHABLE);
        assert!(matches!(
            reachability_cost(&ttr, &ttc, 30.0, 4.0),
            Err(CostError::TtcExceedsCap { .. })
        ));
        let other = Grid4D::new(
            [(0.0, 2.0), (0.0, 1.0), (0.0, 0.6), (-PI, PI)],
            [3, 3, 2, 4],
            [false, false, false, true],
        )
        .unwrap();
        let ttc2 = ValueField::filled(other, FieldKind::Ttc, 3.0, DEFAULT_UNREACHABLE);
        assert!(matches!(reachability_cost(&ttr, &ttc2, 30.0, 4.0), Err(CostError::GridMismatch)));
    }

    #[test]
    fn heuristic_cost_formula() {
        let map = OccupancyMap::empty(10, 10, 0.1, (0.0, 0.0)).unwrap();
        let mut d_obs = DistanceField {
            kind: DistanceKind::ObstacleDist,
            field: Field2D::filled(&map, 1.0),
        };
        let mut d_goal =
            DistanceField { kind: DistanceKind::GoalDist, field: Field2D::filled(&map, 2.0) };
        // far from obstacles the proximity term clamps to zero
        let cost = heuristic_cost(&d_obs, &d_goal, 0.3, 1.0).unwrap();
        assert_relative_eq!(cost.as_planar().unwrap().get(5, 5), 4.0);
        // touching an obstacle: (0.3)^3 + 1.0 * 4 = 0.027 + 4
        d_obs.field.set(5, 5, 0.0);
        let cost = heuristic_cost(&d_obs, &d_goal, 0.3, 1.0).unwrap();
        assert_relative_eq!(cost.as_planar().unwrap().get(5, 5), 4.027, epsilon = 1e-12);
        // at the goal-disk boundary in open space the cost vanishes
        d_goal.field.set(7, 7, 0.0);
        let cost = heuristic_cost(&d_obs, &d_goal, 0.3, 1.0).unwrap();
        assert_eq!(cost.as_planar().unwrap().get(7, 7), 0.0);
        assert_eq!(cost.kind(), CostKind::Heuristic);
    }

    #[test]
    fn heuristic_cost_is_constant_in_speed_and_heading() {
        let map = OccupancyMap::empty(10, 10, 0.1, (0.0, 0.0)).unwrap();
        let d_obs = DistanceField {
            kind: DistanceKind::ObstacleDist,
            field: Field2D::filled(&map, 0.2),
        };
        let d_goal =
            DistanceField { kind: DistanceKind::GoalDist, field: Field2D::filled(&map, 1.5) };
        let cost = heuristic_cost(&d_obs, &d_goal, 0.3, 1.0).unwrap();
        let a = cost.value_at(&VehicleState::new(0.5, 0.5, 0.0, 0.0));
        let b = cost.value_at(&VehicleState::new(0.5, 0.5, 0.6, -2.0));
        assert_eq!(a, b);
    }

    #[test]
    fn heuristic_cost_validates_params() {
        let map = OccupancyMap::empty(10, 10, 0.1, (0.0, 0.0)).unwrap();
        let d_obs = DistanceField {
            kind: DistanceKind::ObstacleDist,
            field: Field2D::filled(&map, 0.2),
        };
        let d_goal =
            DistanceField { kind: DistanceKind::GoalDist, field: Field2D::filled(&map, 1.5) };
        assert!(heuristic_cost(&d_obs, &d_goal, 0.0, 1.0).is_err());
        assert!(heuristic_cost(&d_goal, &d_obs, 0.3, 1.0).is_err());
    }

    #[test]
    fn off_map_cost_is_unreachable() {
        let map = OccupancyMap::empty(10, 10, 0.1, (0.0, 0.0)).unwrap();
        let d_obs = DistanceField {
            kind: DistanceKind::ObstacleDist,
            field: Field2D::filled(&map, 1.0),
        };
        let d_goal =
            DistanceField { kind: DistanceKind::GoalDist, field: Field2D::filled(&map, 1.0) };
        let cost = heuristic_cost(&d_obs, &d_goal, 0.3, 1.0).unwrap();
        // planar sampling clamps to the lattice; border cells carry the
        // sentinel only when the goal geodesic never reached them, so
        // probe the volumetric path instead
        let g = tiny_grid();
        let ttr = ValueField::filled(g.clone(), FieldKind::Ttr, 5.0, DEFAULT_UNREACHABLE);
        let ttc = ValueField::filled(g, FieldKind::Ttc, 3.0, DEFAULT_UNREACHABLE);
        let vol = reachability_cost(&ttr, &ttc, 30.0, 4.0).unwrap();
        let off = VehicleState::new(50.0, 0.5, 0.3, 0.0);
        assert_eq!(vol.value_at(&off), vol.unreachable());
        let _ = cost;
    }
}
