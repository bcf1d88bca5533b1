//! Independent reference implementations and generators shared by the
//! integration tests and the acceptance runner.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::path::PathBuf;

use coaplan_core::combat::EngagementSpec;
use coaplan_core::scenario::{
    Cell, ClockStart, ControlMeasure, Echelon, ForceGroup, HighLevelTask, MeasureKind, Objective,
    Scenario, Side, Supplies, TerrainCell, TerrainGrid, TerrainKind, Unit, UnitKind,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures")).join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

// ---------------------------------------------------------------- routing

fn passable(g: &TerrainGrid, r: i64, c: i64) -> bool {
    r >= 0
        && c >= 0
        && (r as u32) < g.height
        && (c as u32) < g.width
        && g.cells[(r as u32 * g.width + c as u32) as usize].mobility > 0.0
}

/// Plain Dijkstra over the 8-connected grid. A step costs its length over the
/// entered cell's mobility, in micro-km rounded to the nearest integer;
/// diagonal steps may not squeeze between two blocked orthogonal cells.
pub fn dijkstra_cost(g: &TerrainGrid, from: Cell, to: Cell) -> Option<u64> {
    let w = g.width as i64;
    let start = (from.row as i64, from.col as i64);
    if !passable(g, start.0, start.1) || !passable(g, to.row as i64, to.col as i64) {
        return None;
    }
    let mut dist = vec![u64::MAX; g.cells.len()];
    let mut heap = BinaryHeap::new();
    dist[(start.0 * w + start.1) as usize] = 0;
    heap.push(Reverse((0u64, start.0, start.1)));
    while let Some(Reverse((d, r, c))) = heap.pop() {
        if d > dist[(r * w + c) as usize] {
            continue;
        }
        if (r, c) == (to.row as i64, to.col as i64) {
            return Some(d);
        }
        for dr in -1..=1i64 {
            for dc in -1..=1i64 {
                if (dr, dc) == (0, 0) || !passable(g, r + dr, c + dc) {
                    continue;
                }
                let diag = dr != 0 && dc != 0;
                if diag && !(passable(g, r + dr, c) && passable(g, r, c + dc)) {
                    continue;
                }
                let len = if diag {
                    g.cell_size_km * 2f64.sqrt()
                } else {
                    g.cell_size_km
                };
                let mob = g.cells[((r + dr) * w + c + dc) as usize].mobility;
                let nd = d + (len / mob * 1e6).round() as u64;
                let k = ((r + dr) * w + c + dc) as usize;
                if nd < dist[k] {
                    dist[k] = nd;
                    heap.push(Reverse((nd, r + dr, c + dc)));
                }
            }
        }
    }
    None
}

fn terrain_cell(kind: TerrainKind) -> TerrainCell {
    let mobility = match kind {
        TerrainKind::Open => 1.0,
        TerrainKind::Urban => 0.7,
        TerrainKind::Forest => 0.5,
        TerrainKind::Water | TerrainKind::Obstacle => 0.0,
    };
    TerrainCell { kind, mobility }
}

/// Mixed terrain with roughly `blocked` of the cells impassable.
pub fn random_grid(rng: &mut impl Rng, width: u32, height: u32, blocked: f64) -> TerrainGrid {
    let cells = (0..width * height)
        .map(|_| {
            let x: f64 = rng.gen();
            let kind = if x < blocked / 2.0 {
                TerrainKind::Water
            } else if x < blocked {
                TerrainKind::Obstacle
            } else if x < blocked + 0.15 {
                TerrainKind::Forest
            } else if x < blocked + 0.25 {
                TerrainKind::Urban
            } else {
                TerrainKind::Open
            };
            let mut cell = terrain_cell(kind);
            if kind == TerrainKind::Open {
                // Degraded open ground: arbitrary factors in (0.2, 1].
                cell.mobility = (rng.gen_range(20..=100) as f64) / 100.0;
            }
            cell
        })
        .collect();
    TerrainGrid {
        width,
        height,
        cell_size_km: 1.0,
        cells,
    }
}

/// Cells reachable from the first passable cell under the routing rule.
pub fn largest_component(g: &TerrainGrid) -> Vec<Cell> {
    let w = g.width as i64;
    let mut seen = vec![false; g.cells.len()];
    let mut best: Vec<Cell> = Vec::new();
    for start in 0..g.cells.len() {
        if seen[start] || g.cells[start].mobility <= 0.0 {
            continue;
        }
        let mut comp = Vec::new();
        let mut q = VecDeque::from([start]);
        seen[start] = true;
        while let Some(k) = q.pop_front() {
            let (r, c) = (k as i64 / w, k as i64 % w);
            comp.push(Cell::new(r as u32, c as u32));
            for dr in -1..=1i64 {
                for dc in -1..=1i64 {
                    if (dr, dc) == (0, 0) || !passable(g, r + dr, c + dc) {
                        continue;
                    }
                    if dr != 0 && dc != 0 && !(passable(g, r + dr, c) && passable(g, r, c + dc)) {
                        continue;
                    }
                    let n = ((r + dr) * w + c + dc) as usize;
                    if !seen[n] {
                        seen[n] = true;
                        q.push_back(n);
                    }
                }
            }
        }
        if comp.len() > best.len() {
            best = comp;
        }
    }
    best
}

// ---------------------------------------------------------------- combat

/// Square-law losses by classical RK4 at a 1e-4 minute step, stopping at the
/// first zero crossing (located by linear interpolation inside the step).
pub fn reference_losses(e: &EngagementSpec) -> (f64, f64) {
    const H: f64 = 1e-4;
    let (b0, r0) = (e.blue_strength, e.red_strength);
    if b0 <= 0.0 || r0 <= 0.0 {
        return (0.0, 0.0);
    }
    let f = |b: f64, r: f64| (-e.red_kill_rate * r, -e.blue_kill_rate * b);
    let (mut b, mut r) = (b0, r0);
    let steps = (e.duration_min as f64 / H).round() as u64;
    for _ in 0..steps {
        let (k1b, k1r) = f(b, r);
        let (k2b, k2r) = f(b + H / 2.0 * k1b, r + H / 2.0 * k1r);
        let (k3b, k3r) = f(b + H / 2.0 * k2b, r + H / 2.0 * k2r);
        let (k4b, k4r) = f(b + H * k3b, r + H * k3r);
        let nb = b + H / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        let nr = r + H / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        if nb <= 0.0 || nr <= 0.0 {
            let tb = if nb <= 0.0 { b / (b - nb) } else { 1.0 };
            let tr = if nr <= 0.0 { r / (r - nr) } else { 1.0 };
            let t = tb.min(tr);
            let (cb, cr) = (b + t * (nb - b), r + t * (nr - r));
            return if tb <= tr {
                (b0, r0 - cr.clamp(0.0, r))
            } else {
                (b0 - cb.clamp(0.0, b), r0)
            };
        }
        b = nb;
        r = nr;
    }
    (b0 - b, r0 - r)
}

pub fn random_engagement(rng: &mut impl Rng) -> EngagementSpec {
    EngagementSpec {
        blue_strength: rng.gen_range(1.0..500.0),
        red_strength: rng.gen_range(1.0..500.0),
        blue_kill_rate: rng.gen_range(0.0..0.05),
        red_kill_rate: rng.gen_range(0.0..0.05),
        duration_min: rng.gen_range(1..=60),
    }
}

// ---------------------------------------------------------------- planner

/// KB for generated scenarios: the brigade knowledge without applicability
/// conditions, so every generated COA is expandable.
pub fn random_kb_text() -> String {
    read_fixture("brigade.kb").replace("when exists_unit(enemy, infantry, within 30 km)", "")
}

/// Verbs a generated COA may use.
pub const RANDOM_VERBS: [&str; 7] = [
    "tactical_march",
    "screen",
    "forward_passage_of_lines",
    "breach",
    "attack",
    "resupply_op",
    "hasty_defense",
];

/// A small valid scenario: connected mixed terrain, two units of every kind
/// per side, a few measures and groups, and 2 to 8 tasks with random
/// ordering edges to earlier tasks.
pub fn random_scenario(rng: &mut impl Rng, seed: u64) -> Scenario {
    loop {
        let w = rng.gen_range(12..=18);
        let h = rng.gen_range(12..=18);
        let terrain = random_grid(rng, w, h, 0.08);
        let mut cells = largest_component(&terrain);
        if cells.len() < (w * h) as usize / 2 {
            continue;
        }
        cells.shuffle(rng);
        let mut pick = cells.into_iter();
        let mut units = Vec::new();
        for side in [Side::Friendly, Side::Enemy] {
            for kind in UnitKind::ALL {
                for k in 0..2 {
                    let prefix = if side == Side::Friendly { "f" } else { "e" };
                    units.push(Unit {
                        id: format!("{prefix}-{}-{k}", kind.as_str()),
                        side,
                        kind,
                        echelon: Echelon::Company,
                        strength: rng.gen_range(30.0..120.0),
                        position: pick.next().unwrap(),
                        max_speed_kmh: rng.gen_range(5.0..40.0),
                        weapon_range_km: rng.gen_range(0.5..15.0),
                        supplies: Supplies {
                            fuel_l: rng.gen_range(0.0..400.0),
                            ammo_u: rng.gen_range(0.0..80.0),
                        },
                    });
                }
            }
        }
        let measures: Vec<ControlMeasure> = (0..4)
            .map(|i| {
                let kind = [
                    MeasureKind::Axis,
                    MeasureKind::PhaseLine,
                    MeasureKind::Objective,
                ][i % 3];
                ControlMeasure {
                    id: format!("m{i}"),
                    kind,
                    geometry: (0..rng.gen_range(1..=3))
                        .map(|_| pick.next().unwrap())
                        .collect(),
                    label: format!("M{i}"),
                }
            })
            .filter(|m| m.anchor().is_some())
            .collect();
        let groups = vec![
            ForceGroup {
                id: "tf-a".into(),
                members: vec!["f-armor-0".into(), "f-infantry-0".into()],
            },
            ForceGroup {
                id: "en-a".into(),
                members: vec!["e-armor-0".into(), "e-infantry-0".into()],
            },
        ];
        let actors: Vec<String> = units
            .iter()
            .map(|u| u.id.clone())
            .chain(groups.iter().map(|g| g.id.clone()))
            .collect();
        let n_tasks = rng.gen_range(2..=8);
        let mut coa: Vec<HighLevelTask> = Vec::new();
        for i in 0..n_tasks {
            let objective = if rng.gen_bool(0.5) && !measures.is_empty() {
                Objective::Measure(measures[rng.gen_range(0..measures.len())].id.clone())
            } else {
                Objective::Cell(pick.next().unwrap())
            };
            let after = coa
                .iter()
                .filter(|_| rng.gen_bool(0.3))
                .map(|t| t.id.clone())
                .collect();
            let verb = RANDOM_VERBS[rng.gen_range(0..RANDOM_VERBS.len())];
            // Hauling needs a logistics performer.
            let actor = if verb == "resupply_op" {
                format!(
                    "{}-logistics-{}",
                    ["f", "e"][rng.gen_range(0..2)],
                    rng.gen_range(0..2)
                )
            } else {
                actors[rng.gen_range(0..actors.len())].clone()
            };
            coa.push(HighLevelTask {
                id: format!("t{i}"),
                verb: verb.to_string(),
                actor,
                objective,
                after,
            });
        }
        return Scenario {
            name: format!("random-{seed}"),
            clock_start: ClockStart::parse("2026-05-01T06:00").unwrap(),
            terrain,
            units,
            measures,
            groups,
            coa,
        };
    }
}
