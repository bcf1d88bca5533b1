//! Per-minute unit positions for animating a plan.

use serde::{Deserialize, Serialize};

use crate::plan::{ActionNode, ForceRecord, Plan};
use crate::scenario::{Side, UnitKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitTrack {
    pub id: String,
    pub side: Side,
    pub kind: UnitKind,
    /// Fractional `[row, col]` at minutes `0..=horizon_min`.
    pub samples: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timeline {
    pub horizon_min: i64,
    pub units: Vec<UnitTrack>,
}

/// Position of a unit at `t`, interpolated along the route in progress.
pub fn point_at(force: &ForceRecord, nodes: &[ActionNode], t: i64) -> [f64; 2] {
    let latest = nodes
        .iter()
        .filter(|n| n.actor == force.id)
        .filter_map(|n| Some((n.window?, n.route.as_ref()?, n.id)))
        .filter(|(w, _, _)| w.start_min <= t)
        .max_by_key(|(w, _, id)| (w.start_min, *id));
    match latest {
        None => [force.position.row as f64, force.position.col as f64],
        Some((w, route, _)) => {
            let frac = if w.duration() == 0 {
                1.0
            } else {
                (t - w.start_min) as f64 / w.duration() as f64
            };
            route.point_at(frac)
        }
    }
}

pub fn build_timeline(p: &Plan) -> Timeline {
    let horizon = p.horizon_min();
    Timeline {
        horizon_min: horizon,
        units: p
            .forces
            .iter()
            .map(|f| UnitTrack {
                id: f.id.clone(),
                side: f.side,
                kind: f.kind,
                samples: (0..=horizon).map(|t| point_at(f, &p.nodes, t)).collect(),
            })
            .collect(),
    }
}
