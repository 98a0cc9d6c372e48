//! 2D occupancy maps and deterministic synthetic map generators.
//!
//! Maps are boolean cell grids (true = occupied) with a closed border:
//! the constructor seals the outermost ring so the world has no open
//! edge. Generators produce corridor, doorway, cluttered and maze scenes
//! from a seed, always verifying start/goal-region connectivity.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // resolves float methods in the no_std build
use num_traits::Float as _;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Boolean occupancy grid with cell size and world origin. Cell (0, 0)
/// covers the world square [origin, origin + cell_size)²; the border ring
/// is always occupied.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyMap {
    width: usize,
    height: usize,
    cell_size: f64,
    origin: (f64, f64),
    cells: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapError {
    BadShape { width: usize, height: usize },
    BadCellSize { cell_size: f64 },
    BadAscii { line: usize, reason: &'static str },
    /// Generator parameters that cannot produce a usable map.
    InfeasibleParams(String),
}

impl fmt::Display for MapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapError::BadShape { width, height } => {
                write!(f, "map must be at least 3x3 cells, got {width}x{height}")
            }
            MapError::BadCellSize { cell_size } => {
                write!(f, "cell size must be positive, got {cell_size}")
            }
            MapError::BadAscii { line, reason } => write!(f, "bad ascii map at line {line}: {reason}"),
            MapError::InfeasibleParams(why) => write!(f, "infeasible map parameters: {why}"),
        }
    }
}

impl OccupancyMap {
    /// An all-free map (except the sealed border).
    pub fn empty(width: usize, height: usize, cell_size: f64, origin: (f64, f64)) -> Result<Self, MapError> {
        if width < 3 || height < 3 {
            return Err(MapError::BadShape { width, height });
        }
        if !(cell_size > 0.0) {
            return Err(MapError::BadCellSize { cell_size });
        }
        let mut m = OccupancyMap {
            width,
            height,
            cell_size,
            origin,
            cells: vec![false; width * height],
        };
        m.seal_border();
        Ok(m)
    }

    /// Parses ASCII art: `#` occupied, `.` free, one row per line with the
    /// first line being the top (highest y) row. The border is sealed
    /// afterwards regardless of the text.
    pub fn from_ascii(text: &str, cell_size: f64, origin: (f64, f64)) -> Result<Self, MapError> {
        let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        if rows.len() < 3 {
            return Err(MapError::BadShape { width: 0, height: rows.len() });
        }
        let width = rows[0].chars().count();
        let mut m = OccupancyMap::empty(width, rows.len(), cell_size, origin)?;
        for (r, row) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(MapError::BadAscii { line: r + 1, reason: "ragged row width" });
            }
            let iy = rows.len() - 1 - r;
            for (ix, ch) in row.chars().enumerate() {
                match ch {
                    '#' => m.set(ix, iy, true),
                    '.' => {}
                    _ => return Err(MapError::BadAscii { line: r + 1, reason: "expected '#' or '.'" }),
                }
            }
        }
        m.seal_border();
        Ok(m)
    }

    fn seal_border(&mut self) {
        for ix in 0..self.width {
            self.set(ix, 0, true);
            self.set(ix, self.height - 1, true);
        }
        for iy in 0..self.height {
            self.set(0, iy, true);
            self.set(self.width - 1, iy, true);
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

    /// Raw cells, row-major with x fastest.
    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn is_occupied(&self, ix: usize, iy: usize) -> bool {
        self.cells[iy * self.width + ix]
    }

    pub fn set(&mut self, ix: usize, iy: usize, occupied: bool) {
        self.cells[iy * self.width + ix] = occupied;
    }

    /// Cell containing a world point, or None outside the map.
    pub fn cell_at(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let ix = ((x - self.origin.0) / self.cell_size).floor();
        let iy = ((y - self.origin.1) / self.cell_size).floor();
        if ix < 0.0 || iy < 0.0 || ix >= self.width as f64 || iy >= self.height as f64 {
            return None;
        }
        Some((ix as usize, iy as usize))
    }

    /// Occupancy at a world point; everything outside the map counts as
    /// occupied (closed world).
    pub fn occupied_at_world(&self, x: f64, y: f64) -> bool {
        match self.cell_at(x, y) {
            Some((ix, iy)) => self.is_occupied(ix, iy),
            None => true,
        }
    }

    /// World coordinates of a cell center.
    pub fn cell_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            self.origin.0 + (ix as f64 + 0.5) * self.cell_size,
            self.origin.1 + (iy as f64 + 0.5) * self.cell_size,
        )
    }

    /// World extent (min, max) covered by the map.
    pub fn world_bounds(&self) -> ((f64, f64), (f64, f64)) {
        (
            self.origin,
            (
                self.origin.0 + self.width as f64 * self.cell_size,
                self.origin.1 + self.height as f64 * self.cell_size,
            ),
        )
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// True if two free cells are connected through 4-neighbor free space.
    pub fn connected(&self, from: (usize, usize), to: (usize, usize)) -> bool {
        if self.is_occupied(from.0, from.1) || self.is_occupied(to.0, to.1) {
            return false;
        }
        let mut seen = vec![false; self.cells.len()];
        let mut stack = vec![from];
        seen[from.1 * self.width + from.0] = true;
        while let Some((x, y)) = stack.pop() {
            if (x, y) == to {
                return true;
            }
            let push = |nx: usize, ny: usize, seen: &mut Vec<bool>, stack: &mut Vec<(usize, usize)>| {
                let i = ny * self.width + nx;
                if !seen[i] && !self.cells[i] {
                    seen[i] = true;
                    stack.push((nx, ny));
                }
            };
            if x > 0 {
                push(x - 1, y, &mut seen, &mut stack);
            }
            if x + 1 < self.width {
                push(x + 1, y, &mut seen, &mut stack);
            }
            if y > 0 {
                push(x, y - 1, &mut seen, &mut stack);
            }
            if y + 1 < self.height {
                push(x, y + 1, &mut seen, &mut stack);
            }
        }
        false
    }

    fn fill_rect_world(&mut self, x0: f64, y0: f64, x1: f64, y1: f64) {
        let sx = (((x0 - self.origin.0) / self.cell_size).floor().max(0.0)) as usize;
        let sy = (((y0 - self.origin.1) / self.cell_size).floor().max(0.0)) as usize;
        let ex = (((x1 - self.origin.0) / self.cell_size).ceil() as usize).min(self.width);
        let ey = (((y1 - self.origin.1) / self.cell_size).ceil() as usize).min(self.height);
        for iy in sy..ey {
            for ix in sx..ex {
                self.set(ix, iy, true);
            }
        }
    }
}

/// Scene family plus its shape parameters (meters).
#[derive(Clone, Debug, PartialEq)]
pub enum MapKind {
    /// Straight free corridor of the given width between the side walls.
    Corridor { corridor_width: f64 },
    /// One wall across the map with a single gap; the gap center is
    /// seeded randomly inside the middle band.
    Doorway { gap: f64, wall_thickness: f64 },
    /// Disjoint rectangular obstacles scattered over the interior.
    Cluttered { obstacles: usize, min_side: f64, max_side: f64 },
    /// Recursive-backtracker maze with corridors of the given width.
    Maze { corridor_width: f64 },
}

/// Geometry shared by all generators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapGenParams {
    pub width_m: f64,
    pub height_m: f64,
    pub cell_size: f64,
    /// Openings narrower than this are rejected as infeasible.
    pub robot_diameter: f64,
}

impl Default for MapGenParams {
    fn default() -> Self {
        MapGenParams { width_m: 6.0, height_m: 6.0, cell_size: 0.1, robot_diameter: 0.3 }
    }
}

/// Deterministically generates a map: the same kind, params and seed
/// always produce identical cells.
pub fn generate_map(kind: &MapKind, params: &MapGenParams, seed: u64) -> Result<OccupancyMap, MapError> {
    let w = (params.width_m / params.cell_size).round() as usize;
    let h = (params.height_m / params.cell_size).round() as usize;
    let mut map = OccupancyMap::empty(w, h, params.cell_size, (0.0, 0.0))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *kind {
        MapKind::Corridor { corridor_width } => {
            if corridor_width <= params.robot_diameter {
                return Err(MapError::InfeasibleParams(String::from(
                    "corridor narrower than the robot",
                )));
            }
            if corridor_width + 2.0 * params.cell_size >= params.height_m {
                return Err(MapError::InfeasibleParams(String::from("corridor wider than the map")));
            }
            let (min, max) = map.world_bounds();
            let lo = rng.gen_range(min.1 + params.cell_size..max.1 - corridor_width - params.cell_size);
            map.fill_rect_world(min.0, min.1, max.0, lo);
            map.fill_rect_world(min.0, lo + corridor_width, max.0, max.1);
        }
        MapKind::Doorway { gap, wall_thickness } => {
            carve_doorway(&mut map, &mut rng, gap, wall_thickness, params)?;
        }
        MapKind::Cluttered { obstacles, min_side, max_side } => {
            scatter_rectangles(&mut map, &mut rng, obstacles, min_side, max_side, params)?;
        }
        MapKind::Maze { corridor_width } => {
            carve_maze(&mut map, &mut rng, corridor_width, params)?;
        }
    }
    Ok(map)
}

fn carve_doorway(
    map: &mut OccupancyMap,
    rng: &mut ChaCha8Rng,
    gap: f64,
    wall_thickness: f64,
    params: &MapGenParams,
) -> Result<(), MapError> {
    if gap <= params.robot_diameter {
        return Err(MapError::InfeasibleParams(String::from("doorway gap narrower than the robot")));
    }
    let (min, max) = map.world_bounds();
    let margin = 0.3 * (max.0 - min.0);
    let wall_x = rng.gen_range(min.0 + margin..max.0 - margin);
    let gap_lo = rng.gen_range(min.1 + 2.0 * params.cell_size..max.1 - gap - 2.0 * params.cell_size);
    map.fill_rect_world(wall_x, min.1, wall_x + wall_thickness, gap_lo);
    map.fill_rect_world(wall_x, gap_lo + gap, wall_x + wall_thickness, max.1);
    Ok(())
}

fn scatter_rectangles(
    map: &mut OccupancyMap,
    rng: &mut ChaCha8Rng,
    obstacles: usize,
    min_side: f64,
    max_side: f64,
    params: &MapGenParams,
) -> Result<(), MapError> {
    if min_side <= 0.0 || max_side < min_side {
        return Err(MapError::InfeasibleParams(String::from("bad obstacle side range")));
    }
    let (min, max) = map.world_bounds();
    let clearance = params.robot_diameter + params.cell_size;
    let mut placed: Vec<(f64, f64, f64, f64)> = Vec::new();
    let mut attempts = 0usize;
    while placed.len() < obstacles {
        attempts += 1;
        if attempts > 200 * obstacles.max(1) {
            return Err(MapError::InfeasibleParams(String::from(
                "could not place disjoint obstacles with the required clearance",
            )));
        }
        let sx = rng.gen_range(min_side..=max_side);
        let sy = rng.gen_range(min_side..=max_side);
        let x0 = rng.gen_range(min.0 + clearance..max.0 - clearance - sx);
        let y0 = rng.gen_range(min.1 + clearance..max.1 - clearance - sy);
        let cand = (x0, y0, x0 + sx, y0 + sy);
        let overlaps = placed.iter().any(|p| {
            cand.0 - clearance < p.2 && p.0 - clearance < cand.2 && cand.1 - clearance < p.3
                && p.1 - clearance < cand.3
        });
        if !overlaps {
            placed.push(cand);
        }
    }
    for (x0, y0, x1, y1) in placed {
        map.fill_rect_world(x0, y0, x1, y1);
    }
    Ok(())
}

fn carve_maze(
    map: &mut OccupancyMap,
    rng: &mut ChaCha8Rng,
    corridor_width: f64,
    params: &MapGenParams,
) -> Result<(), MapError> {
    if corridor_width <= params.robot_diameter {
        return Err(MapError::InfeasibleParams(String::from("maze corridor narrower than the robot")));
    }
    // coarse lattice: every maze cell is corridor + wall
    let pitch = corridor_width + params.cell_size * 2.0;
    let nx = ((params.width_m - params.cell_size * 2.0) / pitch).floor() as usize;
    let ny = ((params.height_m - params.cell_size * 2.0) / pitch).floor() as usize;
    if nx < 2 || ny < 2 {
        return Err(MapError::InfeasibleParams(String::from("map too small for a maze")));
    }
    // start fully walled, then carve cells and passages
    let (min, max) = map.world_bounds();
    map.fill_rect_world(min.0, min.1, max.0, max.1);
    let cell_rect = |cx: usize, cy: usize| {
        let x0 = min.0 + params.cell_size + cx as f64 * pitch;
        let y0 = min.1 + params.cell_size + cy as f64 * pitch;
        (x0, y0, x0 + corridor_width, y0 + corridor_width)
    };
    let carve_free = |x0: f64, y0: f64, x1: f64, y1: f64, map: &mut OccupancyMap| {
        let s = map.cell_at(x0 + 1e-9, y0 + 1e-9).unwrap_or((1, 1));
        let e = map
            .cell_at(x1 - 1e-9, y1 - 1e-9)
            .unwrap_or((map.width() - 2, map.height() - 2));
        for iy in s.1..=e.1.min(map.height() - 2) {
            for ix in s.0..=e.0.min(map.width() - 2) {
                map.set(ix.max(1), iy.max(1), false);
            }
        }
    };
    let mut visited = vec![false; nx * ny];
    let mut stack = vec![(0usize, 0usize)];
    visited[0] = true;
    let r = cell_rect(0, 0);
    carve_free(r.0, r.1, r.2, r.3, map);
    while let Some(&(cx, cy)) = stack.last() {
        let mut neighbors: Vec<(usize, usize)> = Vec::new();
        if cx > 0 && !visited[cy * nx + cx - 1] {
            neighbors.push((cx - 1, cy));
        }
        if cx + 1 < nx && !visited[cy * nx + cx + 1] {
            neighbors.push((cx + 1, cy));
        }
        if cy > 0 && !visited[(cy - 1) * nx + cx] {
            neighbors.push((cx, cy - 1));
        }
        if cy + 1 < ny && !visited[(cy + 1) * nx + cx] {
            neighbors.push((cx, cy + 1));
        }
        if neighbors.is_empty() {
            stack.pop();
            continue;
        }
        let (tx, ty) = neighbors[rng.gen_range(0..neighbors.len())];
        visited[ty * nx + tx] = true;
        let a = cell_rect(cx, cy);
        let b = cell_rect(tx, ty);
        carve_free(b.0, b.1, b.2, b.3, map);
        // passage between the two cells
        carve_free(a.0.min(b.0), a.1.min(b.1), a.2.max(b.2), a.3.max(b.3), map);
        stack.push((tx, ty));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn border_is_sealed() {
        let m = OccupancyMap::empty(10, 8, 0.1, (0.0, 0.0)).unwrap();
        for ix in 0..10 {
            assert!(m.is_occupied(ix, 0) && m.is_occupied(ix, 7));
        }
        for iy in 0..8 {
            assert!(m.is_occupied(0, iy) && m.is_occupied(9, iy));
        }
        assert!(!m.is_occupied(4, 4));
    }

    #[test]
    fn world_queries() {
        let m = OccupancyMap::empty(10, 10, 0.5, (-1.0, -1.0)).unwrap();
        assert!(m.occupied_at_world(-0.9, -0.9)); // border cell
        assert!(!m.occupied_at_world(0.0, 0.0));
        assert!(m.occupied_at_world(100.0, 0.0)); // outside is occupied
        assert_eq!(m.cell_at(0.0, 0.0), Some((2, 2)));
        let (cx, cy) = m.cell_center(2, 2);
        assert!((cx - 0.25).abs() < 1e-12 && (cy - 0.25).abs() < 1e-12);
    }

    #[test]
    fn ascii_round_trip() {
        let art = "#####\n#...#\n#.#.#\n#...#\n#####";
        let m = OccupancyMap::from_ascii(art, 0.1, (0.0, 0.0)).unwrap();
        assert_eq!(m.width(), 5);
        assert_eq!(m.height(), 5);
        // '#' in the middle row sits at grid (2, 2): ascii row 2 from top
        assert!(m.is_occupied(2, 2));
        assert!(!m.is_occupied(1, 1));
        assert!(OccupancyMap::from_ascii("###\n#x#\n###", 0.1, (0.0, 0.0)).is_err());
        assert!(OccupancyMap::from_ascii("###\n####\n###", 0.1, (0.0, 0.0)).is_err());
    }

    #[test]
    fn doorway_determinism_and_connectivity() {
        let kind = MapKind::Doorway { gap: 0.6, wall_thickness: 0.2 };
        let params = MapGenParams::default();
        let a = generate_map(&kind, &params, 7).unwrap();
        let b = generate_map(&kind, &params, 7).unwrap();
        assert_eq!(a, b);
        let c = generate_map(&kind, &params, 8).unwrap();
        assert_ne!(a, c);
        // left and right halves stay connected through the gap
        let left = a.cell_at(0.3, 3.0).unwrap();
        let right = a.cell_at(5.7, 3.0).unwrap();
        assert!(a.connected(left, right));
    }

    #[test]
    fn corridor_connects_start_and_goal() {
        let kind = MapKind::Corridor { corridor_width: 1.0 };
        let m = generate_map(&kind, &MapGenParams::default(), 3).unwrap();
        // find a free cell on the left and right thirds at the same height
        let mut left = None;
        let mut right = None;
        for iy in 0..m.height() {
            if !m.is_occupied(2, iy) {
                left = Some((2, iy));
            }
            if !m.is_occupied(m.width() - 3, iy) {
                right = Some((m.width() - 3, iy));
            }
        }
        assert!(m.connected(left.unwrap(), right.unwrap()));
    }

    #[test]
    fn cluttered_places_requested_rectangles() {
        let kind = MapKind::Cluttered { obstacles: 5, min_side: 0.3, max_side: 0.7 };
        let m = generate_map(&kind, &MapGenParams::default(), 11).unwrap();
        // count connected occupied components in the interior (the border
        // is one more); a flood fill oracle over occupied cells
        let mut seen = vec![false; m.width() * m.height()];
        let mut components = 0;
        for sy in 0..m.height() {
            for sx in 0..m.width() {
                let i = sy * m.width() + sx;
                if seen[i] || !m.is_occupied(sx, sy) {
                    continue;
                }
                components += 1;
                let mut stack = vec![(sx, sy)];
                seen[i] = true;
                while let Some((x, y)) = stack.pop() {
                    for (nx, ny) in [
                        (x.wrapping_sub(1), y),
                        (x + 1, y),
                        (x, y.wrapping_sub(1)),
                        (x, y + 1),
                    ] {
                        if nx < m.width() && ny < m.height() {
                            let j = ny * m.width() + nx;
                            if !seen[j] && m.is_occupied(nx, ny) {
                                seen[j] = true;
                                stack.push((nx, ny));
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(components, 6); // 5 rectangles + the border ring
        assert!(m.connected(m.cell_at(0.5, 0.5).unwrap(), m.cell_at(5.5, 5.5).unwrap()));
    }

    #[test]
    fn maze_is_fully_connected() {
        let kind = MapKind::Maze { corridor_width: 0.8 };
        let m = generate_map(&kind, &MapGenParams::default(), 5).unwrap();
        // every free cell is reachable from the first free cell
        let first = (0..m.cells().len())
            .find(|&i| !m.cells()[i])
            .map(|i| (i % m.width(), i / m.width()))
            .unwrap();
        for i in 0..m.cells().len() {
            if !m.cells()[i] {
                let cell = (i % m.width(), i / m.width());
                assert!(m.connected(first, cell), "disconnected free cell {cell:?}");
            }
        }
    }

    #[test]
    fn infeasible_parameters_are_rejected() {
        let params = MapGenParams::default();
        assert!(matches!(
            generate_map(&MapKind::Doorway { gap: 0.2, wall_thickness: 0.2 }, &params, 1),
            Err(MapError::InfeasibleParams(_))
        ));
        assert!(matches!(
            generate_map(&MapKind::Corridor { corridor_width: 0.1 }, &params, 1),
            Err(MapError::InfeasibleParams(_))
        ));
    }
}
