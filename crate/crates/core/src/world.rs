//! Projected world state at a plan time.
//!
//! Positions follow scheduled routes, interpolated linearly while a move is
//! under way. Strength and supplies subtract the ledger entries of actions
//! that have finished by the projection time.

use crate::combat::{AttritionResult, SupplyDelta};
use crate::plan::{ActionNode, ForceRecord};
use crate::scenario::{Cell, Scenario, Side, TerrainGrid, UnitKind};

#[derive(Clone, Debug, PartialEq)]
pub struct UnitState {
    pub id: String,
    pub side: Side,
    pub kind: UnitKind,
    pub position: Cell,
    pub strength: f64,
    pub fuel_l: f64,
    pub ammo_u: f64,
}

#[derive(Clone, Debug)]
pub struct WorldState<'a> {
    pub terrain: &'a TerrainGrid,
    pub time_min: i64,
    /// Same order as the scenario's units.
    pub units: Vec<UnitState>,
}

impl<'a> WorldState<'a> {
    /// State at clock start: the scenario's own fields.
    pub fn initial(s: &'a Scenario) -> Self {
        Self {
            terrain: &s.terrain,
            time_min: 0,
            units: s
                .units
                .iter()
                .map(|u| UnitState {
                    id: u.id.clone(),
                    side: u.side,
                    kind: u.kind,
                    position: u.position,
                    strength: u.strength,
                    fuel_l: u.supplies.fuel_l,
                    ammo_u: u.supplies.ammo_u,
                })
                .collect(),
        }
    }

    pub fn unit(&self, id: &str) -> Option<&UnitState> {
        self.units.iter().find(|u| u.id == id)
    }

    pub fn distance_km(&self, a: Cell, b: Cell) -> f64 {
        self.terrain.distance_km(a, b)
    }
}

/// Initial force records of a scenario.
pub fn force_records(s: &Scenario) -> Vec<ForceRecord> {
    s.units
        .iter()
        .map(|u| ForceRecord {
            id: u.id.clone(),
            side: u.side,
            kind: u.kind,
            position: u.position,
            strength: u.strength,
            fuel_l: u.supplies.fuel_l,
            ammo_u: u.supplies.ammo_u,
        })
        .collect()
}

/// Cell a unit occupies at `t` given the scheduled nodes.
pub fn position_at(force: &ForceRecord, nodes: &[ActionNode], t: i64) -> Cell {
    let latest = nodes
        .iter()
        .filter(|n| n.actor == force.id && n.route.is_some())
        .filter_map(|n| n.window.map(|w| (w, n)))
        .filter(|(w, _)| w.start_min <= t)
        .max_by_key(|(w, n)| (w.start_min, n.id));
    match latest {
        None => force.position,
        Some((w, n)) => {
            let route = n.route.as_ref().unwrap();
            if t >= w.end_min || w.duration() == 0 {
                route.destination().unwrap_or(force.position)
            } else {
                route.cell_at((t - w.start_min) as f64 / w.duration() as f64)
            }
        }
    }
}

fn end_of(nodes: &[ActionNode], id: u32) -> Option<i64> {
    nodes
        .get((id as usize).wrapping_sub(1))
        .filter(|n| n.id == id)
        .or_else(|| nodes.iter().find(|n| n.id == id))
        .and_then(|n| n.window)
        .map(|w| w.end_min)
}

/// Projects the world at time `t`.
pub fn project<'a>(
    terrain: &'a TerrainGrid,
    forces: &[ForceRecord],
    nodes: &[ActionNode],
    attrition: &[AttritionResult],
    supply: &[SupplyDelta],
    t: i64,
) -> WorldState<'a> {
    let finished = |node: u32| end_of(nodes, node).is_some_and(|e| e <= t);
    let units = forces
        .iter()
        .map(|f| {
            let mut strength = f.strength;
            for a in attrition.iter().filter(|a| finished(a.node)) {
                if a.actor == f.id {
                    strength -= a.blue_loss;
                }
                if a.target == f.id {
                    strength -= a.red_loss;
                }
            }
            let (mut fuel, mut ammo) = (f.fuel_l, f.ammo_u);
            for d in supply.iter().filter(|d| d.unit == f.id && finished(d.node)) {
                fuel -= d.fuel_l;
                ammo -= d.ammo_u;
            }
            UnitState {
                id: f.id.clone(),
                side: f.side,
                kind: f.kind,
                position: position_at(f, nodes, t),
                strength: strength.max(0.0),
                fuel_l: fuel.max(0.0),
                ammo_u: ammo.max(0.0),
            }
        })
        .collect();
    WorldState {
        terrain,
        time_min: t,
        units,
    }
}
