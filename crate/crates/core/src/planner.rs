//! Interleaved COA expansion.
//!
//! A LIFO agenda drives a single depth-first pass. A compound node is
//! decomposed into children which are processed, in order, before anything
//! else; once they are done the node's window is closed over theirs and its
//! reactions are generated. A primitive node is allocated, routed, scheduled,
//! fought and supplied on the spot, then its reactions are generated. Nothing
//! is ever revisited.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arc::{function_of, generate_reactions, nearest_unit};
use crate::combat::{
    consume_supplies, resolve_engagement, AttritionResult, EngagementSpec, SupplyDelta,
};
use crate::kb::{
    eval_condition, ActivityTemplate, ActorRole, KnowledgeBase, ObjectiveRole, Primitive,
    SubtaskOrder,
};
use crate::plan::{ActionNode, ForceRecord, NodeKind, Origin, Plan, PlanStats, Window};
use crate::routing::{plan_route, travel_time};
use crate::scenario::{coa_order, validate_scenario, HighLevelTask, Objective, Scenario};
use crate::scheduler::{allocate_unit, ready_time, schedule_action, Calendars, ScheduleError};
use crate::violation::Violation;
use crate::world::{force_records, project, WorldState};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub arc_depth_cap: u32,
    pub node_cap: usize,
    pub sync_period_min: u32,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            arc_depth_cap: 3,
            node_cap: 2000,
            sync_period_min: 30,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PlanError {
    #[error("scenario has {} violation(s)", .0.len())]
    InvalidScenario(Vec<Violation>),
    #[error("{node}: no applicable template or primitive for verb {verb}")]
    UnknownVerb { node: String, verb: String },
    #[error("plan exceeds the node cap of {cap}")]
    NodeCapExceeded { cap: usize },
    #[error("{node}: no eligible actor ({reason})")]
    NoEligibleActor { node: String, reason: String },
    #[error("{node}: no route from {from} to {to}")]
    UnroutableAction {
        node: String,
        from: String,
        to: String,
    },
    #[error("{node}: pinned start {pin} infeasible: {reason}")]
    PinInfeasible {
        node: String,
        pin: i64,
        reason: String,
    },
    #[error("edit references unknown {what} {id}")]
    DanglingEdit { what: String, id: String },
    #[error("{node}: unknown control measure {measure}")]
    UnknownMeasure { node: String, measure: String },
}

impl PlanError {
    pub fn code(&self) -> &'static str {
        match self {
            PlanError::InvalidScenario(_) => "InvalidScenario",
            PlanError::UnknownVerb { .. } => "UnknownVerb",
            PlanError::NodeCapExceeded { .. } => "NodeCapExceeded",
            PlanError::NoEligibleActor { .. } => "NoEligibleActor",
            PlanError::UnroutableAction { .. } => "UnroutableAction",
            PlanError::PinInfeasible { .. } => "PinInfeasible",
            PlanError::DanglingEdit { .. } => "DanglingEdit",
            PlanError::UnknownMeasure { .. } => "UnknownMeasure",
        }
    }

    /// Node key or edit target the error is about, if any.
    pub fn path(&self) -> String {
        match self {
            PlanError::InvalidScenario(v) => v.first().map(|v| v.path.clone()).unwrap_or_default(),
            PlanError::UnknownVerb { node, .. }
            | PlanError::NoEligibleActor { node, .. }
            | PlanError::UnroutableAction { node, .. }
            | PlanError::PinInfeasible { node, .. }
            | PlanError::UnknownMeasure { node, .. } => node.clone(),
            PlanError::DanglingEdit { id, .. } => id.clone(),
            PlanError::NodeCapExceeded { .. } => String::new(),
        }
    }
}

fn schedule_error(node: &ActionNode, e: ScheduleError) -> PlanError {
    match e {
        ScheduleError::NoEligibleActor => PlanError::NoEligibleActor {
            node: node.key.clone(),
            reason: "no candidate units".into(),
        },
        ScheduleError::PinInfeasible { pin, reason } => PlanError::PinInfeasible {
            node: node.key.clone(),
            pin,
            reason,
        },
        ScheduleError::UnscheduledDependency(d) => {
            unreachable!("node {} processed before its dependency {d}", node.key)
        }
    }
}

fn new_node(id: u32, key: String, verb: &str, kb: &KnowledgeBase) -> ActionNode {
    ActionNode {
        id,
        key,
        verb: verb.to_string(),
        side: crate::scenario::Side::Friendly,
        actor: String::new(),
        kind: if kb.lookup_template(verb).is_some() {
            NodeKind::Compound
        } else {
            NodeKind::Primitive
        },
        function: function_of(kb, verb),
        objective: Objective::Cell(crate::scenario::Cell::new(0, 0)),
        anchor: crate::scenario::Cell::new(0, 0),
        window: None,
        route: None,
        parent: None,
        deps: Vec::new(),
        not_before: None,
        duration_min: None,
        origin: Origin::Decomposition,
        arc_depth: 1,
        arc: None,
    }
}

/// One child per subtask of `t`, in the template's topological order, with
/// ids from `next_id`. `w` is the world at the parent's ready time.
pub fn decompose(
    s: &Scenario,
    kb: &KnowledgeBase,
    n: &ActionNode,
    t: &ActivityTemplate,
    w: &WorldState<'_>,
    next_id: u32,
) -> Result<Vec<ActionNode>, PlanError> {
    let order = t
        .subtask_order()
        .expect("templates are acyclic after parsing");
    let mut by_name: HashMap<&str, usize> = HashMap::new();
    let mut out: Vec<ActionNode> = Vec::with_capacity(order.len());
    let actor_ids: Vec<&str> = s
        .actor_units(&n.actor)
        .unwrap_or_default()
        .iter()
        .map(|u| u.id.as_str())
        .collect();
    for (k, &i) in order.iter().enumerate() {
        let spec = &t.subtasks[i];
        let key = format!("{}/{}", n.key, spec.name);
        let mut c = new_node(next_id + k as u32, key, &spec.verb, kb);
        c.actor = match &spec.actor_role {
            ActorRole::SelfActor => n.actor.clone(),
            ActorRole::PassedUnit => nearest_unit(w, n.side, None, n.anchor, &actor_ids)
                .ok_or_else(|| PlanError::NoEligibleActor {
                    node: c.key.clone(),
                    reason: "no other friendly unit to pass".into(),
                })?
                .id
                .clone(),
            ActorRole::NearestOf { kind, side } => {
                nearest_unit(w, side.resolve(n.side), Some(*kind), n.anchor, &[])
                    .ok_or_else(|| PlanError::NoEligibleActor {
                        node: c.key.clone(),
                        reason: format!("no {} {} unit", side.as_str(), kind.as_str()),
                    })?
                    .id
                    .clone()
            }
        };
        c.side = s.actor_side(&c.actor).unwrap_or(n.side);
        c.objective = match &spec.objective_role {
            ObjectiveRole::Inherit => n.objective.clone(),
            ObjectiveRole::Anchor => Objective::Cell(n.anchor),
            ObjectiveRole::Measure(m) => Objective::Measure(m.clone()),
        };
        c.anchor = s
            .resolve_objective(&c.objective)
            .ok_or_else(|| PlanError::UnknownMeasure {
                node: c.key.clone(),
                measure: c.objective.to_string(),
            })?;
        c.deps = match &spec.order {
            SubtaskOrder::After(x) => vec![out[by_name[x.as_str()]].id],
            SubtaskOrder::With(x) => out[by_name[x.as_str()]].deps.clone(),
            SubtaskOrder::Free => n.deps.clone(),
        };
        if let Some(f) = spec.function {
            c.function = f;
        }
        c.parent = Some(n.id);
        c.not_before = n.not_before;
        c.duration_min = spec.duration_min;
        c.arc_depth = n.arc_depth;
        by_name.insert(spec.name.as_str(), k);
        out.push(c);
    }
    Ok(out)
}

enum Step {
    Process(u32),
    Finalize(u32),
}

struct Planner<'a> {
    s: &'a Scenario,
    kb: &'a KnowledgeBase,
    cfg: &'a PlannerConfig,
    pins: &'a BTreeMap<String, i64>,
    forces: Vec<ForceRecord>,
    nodes: Vec<ActionNode>,
    children: HashMap<u32, Vec<u32>>,
    agenda: Vec<Step>,
    cals: Calendars,
    attrition: Vec<AttritionResult>,
    supply: Vec<SupplyDelta>,
    /// Per unit: end and destination of its latest movement.
    last_move: HashMap<String, (i64, crate::scenario::Cell)>,
    losses: HashMap<String, f64>,
    consumed: HashMap<String, (f64, f64)>,
}

impl<'a> Planner<'a> {
    fn idx(id: u32) -> usize {
        id as usize - 1
    }

    fn world_at(&self, t: i64) -> WorldState<'a> {
        project(
            &self.s.terrain,
            &self.forces,
            &self.nodes,
            &self.attrition,
            &self.supply,
            t,
        )
    }

    fn add(&mut self, mut products: Vec<ActionNode>) -> Result<(), PlanError> {
        if self.nodes.len() + products.len() > self.cfg.node_cap {
            return Err(PlanError::NodeCapExceeded {
                cap: self.cfg.node_cap,
            });
        }
        for p in products.iter().rev() {
            self.agenda.push(Step::Process(p.id));
        }
        self.nodes.append(&mut products);
        Ok(())
    }

    fn seed(&mut self) -> Result<(), PlanError> {
        let order = coa_order(&self.s.coa).expect("validated scenarios have acyclic COA order");
        let ids: HashMap<&str, u32> = order
            .iter()
            .enumerate()
            .map(|(k, &i)| (self.s.coa[i].id.as_str(), k as u32 + 1))
            .collect();
        let mut seeds = Vec::with_capacity(order.len());
        for (k, &i) in order.iter().enumerate() {
            let t: &HighLevelTask = &self.s.coa[i];
            let mut n = new_node(k as u32 + 1, t.id.clone(), &t.verb, self.kb);
            n.actor = t.actor.clone();
            n.side = self.s.actor_side(&t.actor).expect("validated actor");
            n.objective = t.objective.clone();
            n.anchor = self
                .s
                .resolve_objective(&t.objective)
                .expect("validated objective");
            n.deps = t.after.iter().map(|a| ids[a.as_str()]).collect();
            n.origin = Origin::User;
            seeds.push(n);
        }
        self.add(seeds)
    }

    fn run(&mut self) -> Result<(), PlanError> {
        self.seed()?;
        while let Some(step) = self.agenda.pop() {
            match step {
                Step::Process(id) => self.process(id)?,
                Step::Finalize(id) => self.finalize(id)?,
            }
        }
        Ok(())
    }

    fn process(&mut self, id: u32) -> Result<(), PlanError> {
        let i = Self::idx(id);
        if self.nodes[i].origin == Origin::Counteraction && self.nodes[i].not_before.is_none() {
            let reaction = self.nodes[i].parent.map(Self::idx);
            self.nodes[i].not_before = reaction
                .and_then(|r| self.nodes[r].window)
                .map(|w| w.start_min);
        }
        let verb = self.nodes[i].verb.clone();
        if let Some(p) = self.kb.primitive(&verb) {
            return self.primitive(id, p);
        }
        let Some(t) = self.kb.lookup_template(&verb) else {
            return Err(PlanError::UnknownVerb {
                node: self.nodes[i].key.clone(),
                verb,
            });
        };
        if let Some(&pin) = self.pins.get(&self.nodes[i].key) {
            let nb = self.nodes[i].not_before.unwrap_or(0).max(pin);
            self.nodes[i].not_before = Some(nb);
        }
        let n = self.nodes[i].clone();
        let ready = ready_time(&n, &self.nodes, 0).map_err(|e| schedule_error(&n, e))?;
        let w = self.world_at(ready);
        if let Some(cond) = &t.when {
            let actor: Vec<String> = self
                .s
                .actor_units(&n.actor)
                .unwrap_or_default()
                .iter()
                .map(|u| u.id.clone())
                .collect();
            if !eval_condition(cond, &w, n.anchor, n.side, &actor) {
                return Err(PlanError::UnknownVerb {
                    node: n.key.clone(),
                    verb: format!("{verb} (condition not met)"),
                });
            }
        }
        let kids = decompose(self.s, self.kb, &n, t, &w, self.nodes.len() as u32 + 1)?;
        drop(w);
        self.children
            .insert(id, kids.iter().map(|k| k.id).collect());
        self.agenda.push(Step::Finalize(id));
        self.add(kids)
    }

    fn finalize(&mut self, id: u32) -> Result<(), PlanError> {
        let kids = &self.children[&id];
        let windows: Vec<Window> = kids
            .iter()
            .filter_map(|&k| self.nodes[Self::idx(k)].window)
            .collect();
        debug_assert_eq!(windows.len(), kids.len());
        let start = windows.iter().map(|w| w.start_min).min().unwrap_or(0);
        let end = windows.iter().map(|w| w.end_min).max().unwrap_or(start);
        self.nodes[Self::idx(id)].window = Some(Window::new(start, end));
        self.react(id)
    }

    fn candidates(&self, n: &ActionNode, p: &Primitive) -> Vec<&'a str> {
        let units = self.s.actor_units(&n.actor).unwrap_or_default();
        if self.s.unit(&n.actor).is_some() {
            return units.iter().map(|u| u.id.as_str()).collect();
        }
        units
            .iter()
            .filter(|u| p.actor_kind.is_none_or(|k| u.kind == k))
            .map(|u| u.id.as_str())
            .collect()
    }

    fn primitive(&mut self, id: u32, p: &Primitive) -> Result<(), PlanError> {
        let i = Self::idx(id);
        let n = self.nodes[i].clone();
        let unit_id = allocate_unit(&self.candidates(&n, p), &self.cals)
            .map_err(|e| schedule_error(&n, e))?;
        let unit = self.s.unit(unit_id).expect("allocated units exist");
        let mut duration = n.duration_min.unwrap_or(p.duration_min) as i64;
        let mut earliest = 0;
        let mut route = None;
        if p.moves {
            let (end, from) = self
                .last_move
                .get(unit_id)
                .copied()
                .unwrap_or((0, unit.position));
            let r = plan_route(&self.s.terrain, from, n.anchor).map_err(|e| {
                PlanError::UnroutableAction {
                    node: n.key.clone(),
                    from: e.from.to_string(),
                    to: e.to.to_string(),
                }
            })?;
            duration = duration.max(travel_time(&r, unit) as i64);
            earliest = end;
            route = Some(r);
        }
        let pin = self.pins.get(&n.key).copied();
        let entry = schedule_action(
            &n,
            unit_id,
            duration,
            &self.nodes,
            earliest,
            pin,
            &mut self.cals,
        )
        .map_err(|e| schedule_error(&n, e))?;
        let window = Window::new(entry.start_min, entry.end_min);
        if let Some(r) = &route {
            let dest = r.destination().unwrap_or(n.anchor);
            self.last_move
                .insert(unit_id.to_string(), (window.end_min, dest));
        }
        {
            let node = &mut self.nodes[i];
            node.actor = unit_id.to_string();
            node.side = unit.side;
            node.window = Some(window);
            node.route = route;
        }

        let engaged = if p.engages {
            Some(self.engage(id, unit_id, p, window))
        } else {
            None
        };

        if p.rates.fuel_l_per_min > 0.0 || p.rates.ammo_u_per_min > 0.0 {
            let mut d = consume_supplies(&self.nodes[i], unit_id, &p.rates, engaged);
            let used = self.consumed.entry(unit_id.to_string()).or_default();
            let fuel_left = (unit.supplies.fuel_l - used.0).max(0.0);
            let ammo_left = (unit.supplies.ammo_u - used.1).max(0.0);
            if d.fuel_l > fuel_left {
                d.shortfall_fuel_l = d.fuel_l - fuel_left;
                d.fuel_l = fuel_left;
            }
            if d.ammo_u > ammo_left {
                d.shortfall_ammo_u = d.ammo_u - ammo_left;
                d.ammo_u = ammo_left;
            }
            used.0 += d.fuel_l;
            used.1 += d.ammo_u;
            self.supply.push(d);
        }
        self.react(id)
    }

    /// Fights the nearest opposing unit in range at the start of `window`.
    /// Returns the minutes the engagement was live.
    fn engage(&mut self, id: u32, unit_id: &str, p: &Primitive, window: Window) -> f64 {
        let unit = self.s.unit(unit_id).expect("unit exists");
        let w = self.world_at(window.start_min);
        let Some(me) = w.unit(unit_id) else {
            return 0.0;
        };
        let target = w
            .units
            .iter()
            .filter(|u| u.side == unit.side.opposite() && u.strength > 0.0)
            .map(|u| (w.distance_km(me.position, u.position), u))
            .filter(|(d, _)| *d <= unit.weapon_range_km)
            .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.id.cmp(&b.1.id)))
            .map(|(_, u)| u.clone());
        let me = me.clone();
        drop(w);
        let Some(target) = target else {
            return 0.0;
        };
        let remaining = |id: &str, initial: f64| {
            (initial - self.losses.get(id).copied().unwrap_or(0.0)).max(0.0)
        };
        let blue0 = me.strength.min(remaining(unit_id, unit.strength));
        let red_initial = self.s.unit(&target.id).map_or(0.0, |u| u.strength);
        let red0 = target.strength.min(remaining(&target.id, red_initial));
        let a = resolve_engagement(&EngagementSpec {
            blue_strength: blue0,
            red_strength: red0,
            blue_kill_rate: p.kill_rate,
            red_kill_rate: p.return_rate,
            duration_min: window.duration().max(0) as u32,
        });
        *self.losses.entry(unit_id.to_string()).or_default() += a.blue_loss;
        *self.losses.entry(target.id.clone()).or_default() += a.red_loss;
        self.attrition.push(AttritionResult {
            node: id,
            actor: unit_id.to_string(),
            target: target.id,
            blue_loss: a.blue_loss,
            red_loss: a.red_loss,
            terminated_early: a.terminated_early,
            live_min: a.live_min,
        });
        a.live_min
    }

    fn react(&mut self, id: u32) -> Result<(), PlanError> {
        let i = Self::idx(id);
        let start = self.nodes[i].window.map_or(0, |w| w.start_min);
        let w = self.world_at(start);
        let products = generate_reactions(
            &self.nodes[i],
            &w,
            self.kb,
            self.cfg,
            self.nodes.len() as u32 + 1,
        );
        drop(w);
        self.add(products)
    }
}

fn run(
    s: &Scenario,
    kb: &KnowledgeBase,
    cfg: &PlannerConfig,
    pins: BTreeMap<String, i64>,
    version: u32,
) -> Result<Plan, PlanError> {
    let began = Instant::now();
    let violations = validate_scenario(s);
    if !violations.is_empty() {
        return Err(PlanError::InvalidScenario(violations));
    }
    let mut p = Planner {
        s,
        kb,
        cfg,
        pins: &pins,
        forces: force_records(s),
        nodes: Vec::new(),
        children: HashMap::new(),
        agenda: Vec::new(),
        cals: Calendars::default(),
        attrition: Vec::new(),
        supply: Vec::new(),
        last_move: HashMap::new(),
        losses: HashMap::new(),
        consumed: HashMap::new(),
    };
    p.run()?;
    let node_count = p.nodes.len();
    Ok(Plan {
        version,
        scenario: s.name.clone(),
        clock_start: s.clock_start,
        config: cfg.clone(),
        forces: p.forces,
        pins: pins.clone(),
        nodes: p.nodes,
        attrition_ledger: p.attrition,
        supply_ledger: p.supply,
        stats: PlanStats {
            node_count,
            wall_time_ms: began.elapsed().as_millis() as u64,
        },
    })
}

/// Expands a scenario's COA into a scheduled plan (version 1).
pub fn expand_coa(
    s: &Scenario,
    kb: &KnowledgeBase,
    cfg: &PlannerConfig,
) -> Result<Plan, PlanError> {
    run(s, kb, cfg, BTreeMap::new(), 1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Edit {
    /// Fix a node's start; a lower bound for compound nodes.
    Pin { node: u32, start_min: i64 },
    /// Drop a COA task; its dependents inherit its ordering.
    Delete { task: String },
    /// Replace the COA task with the same id, or append it.
    Amend { task: HighLevelTask },
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EditSet {
    #[serde(default)]
    pub edits: Vec<Edit>,
}

/// Applies an edit set to the scenario behind `prior` and replans from
/// scratch. Pins are stored by node key and carry over to later versions.
pub fn replan_with_edits(
    s: &Scenario,
    kb: &KnowledgeBase,
    cfg: &PlannerConfig,
    prior: &Plan,
    edits: &EditSet,
) -> Result<(Scenario, Plan), PlanError> {
    let mut s = s.clone();
    let mut pins = prior.pins.clone();
    for e in &edits.edits {
        match e {
            Edit::Pin { node, start_min } => {
                let n = prior.node(*node).ok_or_else(|| PlanError::DanglingEdit {
                    what: "node".into(),
                    id: node.to_string(),
                })?;
                pins.insert(n.key.clone(), *start_min);
            }
            Edit::Delete { task } => {
                let at = s.coa.iter().position(|t| &t.id == task).ok_or_else(|| {
                    PlanError::DanglingEdit {
                        what: "task".into(),
                        id: task.clone(),
                    }
                })?;
                let gone = s.coa.remove(at);
                for t in &mut s.coa {
                    if let Some(k) = t.after.iter().position(|a| a == task) {
                        t.after.remove(k);
                        for a in &gone.after {
                            if !t.after.contains(a) {
                                t.after.push(a.clone());
                            }
                        }
                    }
                }
                let prefix = format!("{task}/");
                pins.retain(|k, _| k != task && !k.starts_with(&prefix));
            }
            Edit::Amend { task } => match s.coa.iter_mut().find(|t| t.id == task.id) {
                Some(t) => *t = task.clone(),
                None => s.coa.push(task.clone()),
            },
        }
    }
    let plan = run(&s, kb, cfg, pins, prior.version + 1)?;
    Ok((s, plan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_kb;
    use crate::scenario::load_scenario;

    fn scenario(coa: &str, extra_units: &str) -> Scenario {
        let cells = vec![r#"{"kind":"open","mobility":1.0}"#; 100].join(",");
        let doc = format!(
            r#"{{"name":"t","clock_start":"2026-05-01T06:00",
            "terrain":{{"width":10,"height":10,"cell_size_km":1.0,"cells":[{cells}]}},
            "units":[{{"id":"a1","side":"friendly","kind":"armor","echelon":"company","strength":10,
              "position":[0,0],"max_speed_kmh":20,"weapon_range_km":3,"supplies":{{"fuel_l":500,"ammo_u":100}}}}{extra_units}],
            "measures":[],"coa":[{coa}]}}"#
        );
        load_scenario(&doc).unwrap()
    }

    #[test]
    fn single_primitive_march() {
        let kb = parse_kb("primitive march dur 10 min fn maneuver moves;").unwrap();
        let s = scenario(
            r#"{"id":"t1","verb":"march","actor":"a1","objective":[0,9]}"#,
            "",
        );
        let p = expand_coa(&s, &kb, &PlannerConfig::default()).unwrap();
        assert_eq!(p.nodes.len(), 1);
        let n = &p.nodes[0];
        // 9 km at 20 km/h
        assert_eq!(n.window, Some(Window::new(0, 27)));
        assert_eq!(n.route.as_ref().unwrap().cells.len(), 10);
    }

    const CHAIN: &str = "primitive step dur 10 min fn maneuver;\n\
        activity chain { subtasks { step(self, inherit) as a; step(self, inherit) after a as b; step(self, inherit) after b as c; } }\n";

    #[test]
    fn chain_decomposition() {
        let kb = parse_kb(CHAIN).unwrap();
        let s = scenario(
            r#"{"id":"t1","verb":"chain","actor":"a1","objective":[0,1]}"#,
            "",
        );
        let p = expand_coa(&s, &kb, &PlannerConfig::default()).unwrap();
        let keys: Vec<&str> = p.nodes.iter().map(|n| n.key.as_str()).collect();
        assert_eq!(keys, ["t1", "t1/a", "t1/b", "t1/c"]);
        assert_eq!(p.nodes[2].deps, vec![2]);
        assert_eq!(p.nodes[3].deps, vec![3]);
        assert_eq!(p.nodes[0].window, Some(Window::new(0, 30)));
    }

    #[test]
    fn closed_gate_is_unknown_verb() {
        let kb = parse_kb(
            "primitive step dur 10 min fn maneuver;\n\
             activity guarded { when exists_unit(enemy, artillery, within 5 km) subtasks { step(self, inherit) as a; } }",
        )
        .unwrap();
        let s = scenario(
            r#"{"id":"t1","verb":"guarded","actor":"a1","objective":[0,1]}"#,
            "",
        );
        let e = expand_coa(&s, &kb, &PlannerConfig::default()).unwrap_err();
        assert_eq!(e.code(), "UnknownVerb");
    }

    #[test]
    fn node_cap() {
        let kb = parse_kb(CHAIN).unwrap();
        let s = scenario(
            r#"{"id":"t1","verb":"chain","actor":"a1","objective":[0,1]}"#,
            "",
        );
        let cfg = PlannerConfig {
            node_cap: 3,
            ..PlannerConfig::default()
        };
        assert_eq!(
            expand_coa(&s, &kb, &cfg).unwrap_err(),
            PlanError::NodeCapExceeded { cap: 3 }
        );
    }

    #[test]
    fn edits() {
        let kb = parse_kb(CHAIN).unwrap();
        let s = scenario(
            r#"{"id":"t1","verb":"chain","actor":"a1","objective":[0,1]},
               {"id":"t2","verb":"step","actor":"a1","objective":[0,1],"after":["t1"]}"#,
            "",
        );
        let cfg = PlannerConfig::default();
        let p = expand_coa(&s, &kb, &cfg).unwrap();
        let (_, same) = replan_with_edits(&s, &kb, &cfg, &p, &EditSet::default()).unwrap();
        assert_eq!(same.version, 2);
        assert_eq!(same.nodes, p.nodes);

        let t2 = p.node_by_key("t2").unwrap().id;
        let pin = EditSet {
            edits: vec![Edit::Pin {
                node: t2,
                start_min: 180,
            }],
        };
        let (_, pinned) = replan_with_edits(&s, &kb, &cfg, &p, &pin).unwrap();
        assert_eq!(
            pinned.node_by_key("t2").unwrap().window,
            Some(Window::new(180, 190))
        );

        let early = EditSet {
            edits: vec![Edit::Pin {
                node: t2,
                start_min: 5,
            }],
        };
        assert_eq!(
            replan_with_edits(&s, &kb, &cfg, &p, &early)
                .unwrap_err()
                .code(),
            "PinInfeasible"
        );

        let del = EditSet {
            edits: vec![Edit::Delete { task: "t1".into() }],
        };
        let (s2, gone) = replan_with_edits(&s, &kb, &cfg, &p, &del).unwrap();
        assert_eq!(s2.coa.len(), 1);
        assert!(gone.nodes.iter().all(|n| !n.key.starts_with("t1")));

        let bad = EditSet {
            edits: vec![Edit::Delete { task: "zz".into() }],
        };
        assert_eq!(
            replan_with_edits(&s, &kb, &cfg, &p, &bad)
                .unwrap_err()
                .code(),
            "DanglingEdit"
        );
    }

    #[test]
    fn edit_set_json() {
        let e: EditSet = serde_json::from_str(
            r#"{"edits":[{"pin":{"node":3,"start_min":180}},{"delete":{"task":"t2"}},
               {"amend":{"task":{"id":"t9","verb":"march","actor":"a1","objective":"obj"}}}]}"#,
        )
        .unwrap();
        assert_eq!(e.edits.len(), 3);
        assert_eq!(
            e.edits[0],
            Edit::Pin {
                node: 3,
                start_min: 180
            }
        );
    }
}
