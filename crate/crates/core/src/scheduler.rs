//! Unit allocation and earliest-fit scheduling.
//!
//! Every unit performs one primitive action at a time. Its calendar is an
//! ordered list of disjoint half-open busy intervals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plan::ActionNode;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ScheduleError {
    #[error("no eligible actor")]
    NoEligibleActor,
    #[error("pinned start {pin} infeasible: {reason}")]
    PinInfeasible { pin: i64, reason: String },
    #[error("dependency {0} is not scheduled")]
    UnscheduledDependency(u32),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResourceCalendar {
    busy: Vec<(i64, i64)>,
}

impl ResourceCalendar {
    pub fn intervals(&self) -> &[(i64, i64)] {
        &self.busy
    }

    pub fn busy_minutes(&self) -> i64 {
        self.busy.iter().map(|(s, e)| e - s).sum()
    }

    pub fn is_free(&self, start: i64, end: i64) -> bool {
        end <= start || self.busy.iter().all(|&(s, e)| end <= s || e <= start)
    }

    /// Earliest `t >= ready` with `[t, t + duration)` free.
    pub fn earliest_fit(&self, ready: i64, duration: i64) -> i64 {
        if duration <= 0 {
            return ready;
        }
        let mut t = ready;
        for &(s, e) in &self.busy {
            if e <= t {
                continue;
            }
            if t + duration <= s {
                break;
            }
            t = t.max(e);
        }
        t
    }

    /// End of the last busy interval, if any.
    pub fn last_end(&self) -> Option<i64> {
        self.busy.last().map(|&(_, e)| e)
    }

    /// Inserts a busy interval. Empty intervals occupy nothing.
    pub fn commit(&mut self, start: i64, end: i64) -> bool {
        if end <= start {
            return true;
        }
        if !self.is_free(start, end) {
            return false;
        }
        let at = self.busy.partition_point(|&(s, _)| s < start);
        self.busy.insert(at, (start, end));
        true
    }
}

/// Calendars of all units touched so far, by unit id.
#[derive(Clone, Debug, Default)]
pub struct Calendars(BTreeMap<String, ResourceCalendar>);

impl Calendars {
    pub fn get(&self, unit: &str) -> Option<&ResourceCalendar> {
        self.0.get(unit)
    }

    pub fn entry(&mut self, unit: &str) -> &mut ResourceCalendar {
        self.0.entry(unit.to_string()).or_default()
    }

    pub fn busy_minutes(&self, unit: &str) -> i64 {
        self.get(unit).map_or(0, |c| c.busy_minutes())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub node: u32,
    pub unit: String,
    pub start_min: i64,
    pub end_min: i64,
}

/// Picks the candidate with the fewest busy minutes; ties go to the smallest id.
pub fn allocate_unit<'a>(
    candidates: &[&'a str],
    cals: &Calendars,
) -> Result<&'a str, ScheduleError> {
    candidates
        .iter()
        .copied()
        .min_by(|a, b| {
            cals.busy_minutes(a)
                .cmp(&cals.busy_minutes(b))
                .then_with(|| a.cmp(b))
        })
        .ok_or(ScheduleError::NoEligibleActor)
}

/// Earliest start the node's dependencies and release time allow.
pub fn ready_time(
    n: &ActionNode,
    nodes: &[ActionNode],
    earliest: i64,
) -> Result<i64, ScheduleError> {
    let mut ready = earliest.max(0).max(n.not_before.unwrap_or(0));
    for &d in &n.deps {
        let end = nodes
            .iter()
            .find(|m| m.id == d)
            .and_then(|m| m.window)
            .ok_or(ScheduleError::UnscheduledDependency(d))?;
        ready = ready.max(end.end_min);
    }
    Ok(ready)
}

/// Schedules a primitive on `unit` and commits the interval.
///
/// The start is the earliest free slot at or after every dependency's end,
/// the node's release time and `earliest`. A pin fixes the start exactly and
/// fails if that slot violates a dependency or overlaps the calendar.
pub fn schedule_action(
    n: &ActionNode,
    unit: &str,
    duration: i64,
    nodes: &[ActionNode],
    earliest: i64,
    pin: Option<i64>,
    cals: &mut Calendars,
) -> Result<ScheduleEntry, ScheduleError> {
    let ready = ready_time(n, nodes, earliest)?;
    let cal = cals.entry(unit);
    let start = match pin {
        Some(p) if p < ready => {
            return Err(ScheduleError::PinInfeasible {
                pin: p,
                reason: format!("dependencies allow a start no earlier than {ready}"),
            })
        }
        Some(p) if !cal.is_free(p, p + duration) => {
            return Err(ScheduleError::PinInfeasible {
                pin: p,
                reason: format!("{unit} is busy during [{p}, {})", p + duration),
            })
        }
        Some(p) => p,
        None => cal.earliest_fit(ready, duration),
    };
    let committed = cal.commit(start, start + duration);
    debug_assert!(committed);
    Ok(ScheduleEntry {
        node: n.id,
        unit: unit.to_string(),
        start_min: start,
        end_min: start + duration,
    })
}
