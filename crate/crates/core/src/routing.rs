//! Movement paths and travel times over the terrain grid.
//!
//! Moves are 8-connected. A step costs `step_length_km / mobility(dest)`, so
//! the cost of a route is its terrain-weighted length; travel time is that
//! cost divided by the unit's road speed. Step costs are accumulated as
//! integer micro-kilometres so that every search order sums to exactly the
//! same total. Diagonal steps may not cut the corner of an impassable cell.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::{Cell, TerrainGrid, Unit};

/// Fixed-point scale of route costs (micro-km).
pub const COST_SCALE: f64 = 1e6;

#[derive(Debug, Clone, Error, PartialEq)]
#[error("no passable route from {from} to {to}")]
pub struct Unroutable {
    pub from: Cell,
    pub to: Cell,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub cells: Vec<Cell>,
    pub length_km: f64,
    pub cost: f64,
    /// Cumulative cost on arrival at each cell; first 0, last `cost`.
    pub progress: Vec<f64>,
}

impl Route {
    pub fn destination(&self) -> Option<Cell> {
        self.cells.last().copied()
    }

    /// Cell reached after covering `fraction` of the route's cost.
    pub fn cell_at(&self, fraction: f64) -> Cell {
        let target = fraction.clamp(0.0, 1.0) * self.cost;
        let i = self.progress.partition_point(|&p| p <= target).max(1) - 1;
        self.cells[i]
    }

    /// Fractional `(row, col)` after covering `fraction` of the route's cost,
    /// interpolated linearly between cell centers.
    pub fn point_at(&self, fraction: f64) -> [f64; 2] {
        let target = fraction.clamp(0.0, 1.0) * self.cost;
        let i = self.progress.partition_point(|&p| p <= target).max(1) - 1;
        let a = self.cells[i];
        let Some(&b) = self.cells.get(i + 1) else {
            return [a.row as f64, a.col as f64];
        };
        let span = self.progress[i + 1] - self.progress[i];
        let t = if span > 0.0 {
            (target - self.progress[i]) / span
        } else {
            0.0
        };
        [
            a.row as f64 + t * (b.row as f64 - a.row as f64),
            a.col as f64 + t * (b.col as f64 - a.col as f64),
        ]
    }
}

/// Quantized cost of entering a cell with the given mobility over a step of `len_km`.
pub fn step_cost(len_km: f64, mobility: f64) -> u64 {
    (len_km / mobility * COST_SCALE).round() as u64
}

/// Octile lower bound on the quantized cost between two cells.
pub fn heuristic(g: &TerrainGrid, from: Cell, to: Cell) -> u64 {
    let dr = from.row.abs_diff(to.row) as u64;
    let dc = from.col.abs_diff(to.col) as u64;
    let (lo, hi) = (dr.min(dc), dr.max(dc));
    let orth = step_cost(g.cell_size_km, 1.0);
    let diag = step_cost(g.cell_size_km * SQRT_2, 1.0);
    diag * lo + orth * (hi - lo)
}

/// Passable neighbours of `c` with the quantized cost of stepping into each,
/// in ascending `(row, col)` order.
pub fn neighbors(g: &TerrainGrid, c: Cell) -> impl Iterator<Item = (Cell, u64, bool)> + '_ {
    const OFFSETS: [(i64, i64); 8] = [
        (-1, -1),
        (-1, 0),
        (-1, 1),
        (0, -1),
        (0, 1),
        (1, -1),
        (1, 0),
        (1, 1),
    ];
    OFFSETS.iter().filter_map(move |&(dr, dc)| {
        let r = c.row as i64 + dr;
        let col = c.col as i64 + dc;
        if r < 0 || col < 0 {
            return None;
        }
        let n = Cell::new(r as u32, col as u32);
        if !g.is_passable(n) {
            return None;
        }
        let diagonal = dr != 0 && dc != 0;
        if diagonal
            && !(g.is_passable(Cell::new(r as u32, c.col))
                && g.is_passable(Cell::new(c.row, col as u32)))
        {
            return None;
        }
        let len = if diagonal {
            g.cell_size_km * SQRT_2
        } else {
            g.cell_size_km
        };
        Some((n, step_cost(len, g.mobility(n)), diagonal))
    })
}

/// Minimal-cost route by A* with the octile heuristic.
pub fn plan_route(g: &TerrainGrid, from: Cell, to: Cell) -> Result<Route, Unroutable> {
    let err = Unroutable { from, to };
    if !g.is_passable(from) || !g.is_passable(to) {
        return Err(err);
    }
    let idx = |c: Cell| (c.row * g.width + c.col) as usize;
    let n = g.cells.len();
    let mut best = vec![u64::MAX; n];
    let mut came_from: Vec<Option<(Cell, bool)>> = vec![None; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();

    best[idx(from)] = 0;
    open.push(Reverse((heuristic(g, from, to), from.row, from.col)));
    while let Some(Reverse((_, row, col))) = open.pop() {
        let c = Cell::new(row, col);
        if closed[idx(c)] {
            continue;
        }
        closed[idx(c)] = true;
        if c == to {
            break;
        }
        let g_c = best[idx(c)];
        for (nb, step, diagonal) in neighbors(g, c) {
            if closed[idx(nb)] {
                continue;
            }
            let cand = g_c + step;
            if cand < best[idx(nb)] {
                best[idx(nb)] = cand;
                came_from[idx(nb)] = Some((c, diagonal));
                open.push(Reverse((cand + heuristic(g, nb, to), nb.row, nb.col)));
            }
        }
    }
    if best[idx(to)] == u64::MAX {
        return Err(err);
    }

    let mut cells = vec![to];
    let mut diagonals = 0u32;
    let mut cur = to;
    while let Some((prev, diagonal)) = came_from[idx(cur)] {
        diagonals += diagonal as u32;
        cells.push(prev);
        cur = prev;
    }
    cells.reverse();
    let orthogonals = cells.len() as u32 - 1 - diagonals;
    let mut progress = Vec::with_capacity(cells.len());
    progress.push(0.0);
    for w in cells.windows(2) {
        let prev = best[idx(w[0])];
        let next = best[idx(w[1])];
        debug_assert!(next > prev || w[0] == w[1]);
        progress.push(next as f64 / COST_SCALE);
    }
    Ok(Route {
        length_km: orthogonals as f64 * g.cell_size_km + diagonals as f64 * SQRT_2 * g.cell_size_km,
        cost: best[idx(to)] as f64 / COST_SCALE,
        progress,
        cells,
    })
}

/// Whole minutes a unit needs for a route, rounded up.
pub fn travel_time(r: &Route, u: &Unit) -> u32 {
    travel_time_at(r, u.max_speed_kmh)
}

pub fn travel_time_at(r: &Route, speed_kmh: f64) -> u32 {
    let minutes = 60.0 * r.cost / speed_kmh;
    // Absorb representation noise before rounding up.
    (minutes - 1e-9).ceil().max(0.0) as u32
}
