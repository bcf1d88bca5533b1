//! The detailed plan: action nodes with schedule, routes, provenance and the
//! attrition and supply ledgers.
//!
//! JSON export has a fixed field order and nodes in ascending id order.
//! `stats.wall_time_ms` is not serialized so that exports of identical runs
//! are byte-identical.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::combat::{AttritionResult, SupplyDelta};
use crate::kb::BattlefieldFunction;
use crate::planner::PlannerConfig;
use crate::routing::Route;
use crate::scenario::{Cell, ClockStart, Objective, Side, UnitKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    User,
    Decomposition,
    Reaction,
    Counteraction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    /// Decomposed through a template; window spans its children.
    Compound,
    /// Occupies its actor's calendar.
    Primitive,
}

/// Half-open interval `[start_min, end_min)` in minutes from clock start.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start_min: i64,
    pub end_min: i64,
}

impl Window {
    pub fn new(start_min: i64, end_min: i64) -> Self {
        Self { start_min, end_min }
    }

    pub fn duration(&self) -> i64 {
        self.end_min - self.start_min
    }
}

/// Why an ARC node exists: the rule that fired and the unit it found.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcProvenance {
    pub rule: usize,
    pub reactor: String,
    pub distance_km: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionNode {
    pub id: u32,
    /// Stable provenance path, e.g. `t3/pass/r0@en-arty/c0`. Survives replanning.
    pub key: String,
    pub verb: String,
    pub side: Side,
    /// Unit id; a group id only on compound nodes acting for a group.
    pub actor: String,
    pub kind: NodeKind,
    pub function: BattlefieldFunction,
    pub objective: Objective,
    pub anchor: Cell,
    pub window: Option<Window>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub route: Option<Route>,
    pub parent: Option<u32>,
    /// Must finish before this node starts.
    pub deps: Vec<u32>,
    /// Earliest allowed start (reactions start no earlier than their trigger).
    pub not_before: Option<i64>,
    /// Duration requested by the decomposing template.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub duration_min: Option<u32>,
    pub origin: Origin,
    pub arc_depth: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub arc: Option<ArcProvenance>,
}

impl ActionNode {
    #[cfg(test)]
    pub(crate) fn test_node(id: u32, actor: &str) -> Self {
        ActionNode {
            id,
            key: format!("n{id}"),
            verb: "act".into(),
            side: Side::Friendly,
            actor: actor.into(),
            kind: NodeKind::Primitive,
            function: BattlefieldFunction::Maneuver,
            objective: Objective::Cell(Cell::new(0, 0)),
            anchor: Cell::new(0, 0),
            window: None,
            route: None,
            parent: None,
            deps: Vec::new(),
            not_before: None,
            duration_min: None,
            origin: Origin::User,
            arc_depth: 1,
            arc: None,
        }
    }
}

/// Initial state of a unit, carried in the plan so the plan can be checked
/// and animated on its own.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForceRecord {
    pub id: String,
    pub side: Side,
    pub kind: UnitKind,
    pub position: Cell,
    pub strength: f64,
    pub fuel_l: f64,
    pub ammo_u: f64,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanStats {
    pub node_count: usize,
    #[serde(skip)]
    pub wall_time_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub version: u32,
    pub scenario: String,
    pub clock_start: ClockStart,
    pub config: PlannerConfig,
    pub forces: Vec<ForceRecord>,
    /// Pinned start times by node key.
    pub pins: BTreeMap<String, i64>,
    /// Ascending by id; `nodes[i].id == i + 1`.
    pub nodes: Vec<ActionNode>,
    pub attrition_ledger: Vec<AttritionResult>,
    pub supply_ledger: Vec<SupplyDelta>,
    pub stats: PlanStats,
}

impl Plan {
    pub fn node(&self, id: u32) -> Option<&ActionNode> {
        let n = self.nodes.get((id as usize).checked_sub(1)?)?;
        (n.id == id)
            .then_some(n)
            .or_else(|| self.nodes.iter().find(|n| n.id == id))
    }

    pub fn node_by_key(&self, key: &str) -> Option<&ActionNode> {
        self.nodes.iter().find(|n| n.key == key)
    }

    pub fn force(&self, id: &str) -> Option<&ForceRecord> {
        self.forces.iter().find(|f| f.id == id)
    }

    /// Latest scheduled end, 0 for an empty plan.
    pub fn horizon_min(&self) -> i64 {
        self.nodes
            .iter()
            .filter_map(|n| n.window)
            .map(|w| w.end_min)
            .max()
            .unwrap_or(0)
    }

    /// Ancestors of a node through parent links, nearest first.
    pub fn ancestors(&self, id: u32) -> impl Iterator<Item = &ActionNode> + '_ {
        let mut cur = self.node(id).and_then(|n| n.parent);
        let mut steps = 0;
        std::iter::from_fn(move || {
            let n = self.node(cur?)?;
            steps += 1;
            if steps > self.nodes.len() {
                return None;
            }
            cur = n.parent;
            Some(n)
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}
