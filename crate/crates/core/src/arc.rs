//! Action-reaction-counteraction generation.
//!
//! For every newly planned action the rules keyed on its verb are consulted.
//! Each opposing unit a rule finds within range yields one reaction node;
//! each of the rule's counter verbs then yields a counteraction node on the
//! acting side, aimed at the reactor. There is no search: rules fire in file
//! order, reactors in distance order, and nothing is ever retracted.

use crate::kb::{BattlefieldFunction, KnowledgeBase};
use crate::plan::{ActionNode, ArcProvenance, NodeKind, Origin};
use crate::planner::PlannerConfig;
use crate::scenario::{Cell, Objective, Side, UnitKind};
use crate::world::{UnitState, WorldState};

#[derive(Clone, Debug, PartialEq)]
pub struct ReactorQuery {
    pub side: Side,
    pub kind: UnitKind,
    pub within_km: f64,
    pub anchor: Cell,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReactorMatch<'w> {
    pub unit: &'w UnitState,
    pub distance_km: f64,
}

/// Units matching side and kind within range of the anchor, nearest first,
/// ties by id. Units with no strength left cannot react.
pub fn find_reactors<'w>(w: &'w WorldState<'_>, q: &ReactorQuery) -> Vec<ReactorMatch<'w>> {
    let mut found: Vec<ReactorMatch<'w>> = w
        .units
        .iter()
        .filter(|u| u.side == q.side && u.kind == q.kind && u.strength > 0.0)
        .map(|u| ReactorMatch {
            unit: u,
            distance_km: w.distance_km(u.position, q.anchor),
        })
        .filter(|m| m.distance_km <= q.within_km)
        .collect();
    found.sort_by(|a, b| {
        a.distance_km
            .total_cmp(&b.distance_km)
            .then_with(|| a.unit.id.cmp(&b.unit.id))
    });
    found
}

/// Nearest unit of `side` (and `kind`, if given) to `at`, excluding destroyed units.
pub(crate) fn nearest_unit<'w>(
    w: &'w WorldState<'_>,
    side: Side,
    kind: Option<UnitKind>,
    at: Cell,
    exclude: &[&str],
) -> Option<&'w UnitState> {
    w.units
        .iter()
        .filter(|u| u.side == side && kind.is_none_or(|k| u.kind == k) && u.strength > 0.0)
        .filter(|u| !exclude.contains(&u.id.as_str()))
        .min_by(|a, b| {
            w.distance_km(a.position, at)
                .total_cmp(&w.distance_km(b.position, at))
                .then_with(|| a.id.cmp(&b.id))
        })
}

/// Battlefield function a verb is filed under: the primitive's own, or for a
/// template that of its first subtask.
pub fn function_of(kb: &KnowledgeBase, verb: &str) -> BattlefieldFunction {
    let mut verb = verb;
    for _ in 0..32 {
        if let Some(p) = kb.primitive(verb) {
            return p.function;
        }
        let Some(first) = kb.lookup_template(verb).and_then(|t| t.subtasks.first()) else {
            break;
        };
        if let Some(f) = first.function {
            return f;
        }
        verb = &first.verb;
    }
    BattlefieldFunction::Maneuver
}

fn node_kind(kb: &KnowledgeBase, verb: &str) -> NodeKind {
    if kb.lookup_template(verb).is_some() {
        NodeKind::Compound
    } else {
        NodeKind::Primitive
    }
}

/// Reactions to `n` and the counteractions to each, in rule order then
/// reactor order. Ids are assigned consecutively from `next_id`.
///
/// `n` must be scheduled. Reactions start no earlier than `n`; each
/// counteraction is a child of its reaction. Nodes that would exceed the
/// configured ARC depth are not generated.
pub fn generate_reactions(
    n: &ActionNode,
    w: &WorldState<'_>,
    kb: &KnowledgeBase,
    cfg: &PlannerConfig,
    next_id: u32,
) -> Vec<ActionNode> {
    let mut out = Vec::new();
    if n.arc_depth >= cfg.arc_depth_cap {
        return out;
    }
    let Some(window) = n.window else {
        return out;
    };
    let mut id = next_id;
    for rule in kb.arc_rules(&n.verb) {
        let q = ReactorQuery {
            side: rule.reactor.side.resolve(n.side),
            kind: rule.reactor.kind,
            within_km: rule.reactor.within_km,
            anchor: n.anchor,
        };
        for m in find_reactors(w, &q) {
            let reactor = m.unit;
            let reaction_id = id;
            id += 1;
            let reaction_key = format!("{}/r{}@{}", n.key, rule.id, reactor.id);
            out.push(ActionNode {
                id: reaction_id,
                key: reaction_key.clone(),
                verb: rule.reaction_verb.clone(),
                side: reactor.side,
                actor: reactor.id.clone(),
                kind: node_kind(kb, &rule.reaction_verb),
                function: function_of(kb, &rule.reaction_verb),
                objective: Objective::Cell(n.anchor),
                anchor: n.anchor,
                window: None,
                route: None,
                parent: Some(n.id),
                deps: Vec::new(),
                not_before: Some(window.start_min),
                duration_min: None,
                origin: Origin::Reaction,
                arc_depth: n.arc_depth + 1,
                arc: Some(ArcProvenance {
                    rule: rule.id,
                    reactor: reactor.id.clone(),
                    distance_km: m.distance_km,
                }),
            });
            if n.arc_depth + 2 > cfg.arc_depth_cap {
                continue;
            }
            for (i, verb) in rule.counter_verbs.iter().enumerate() {
                let kind = kb.primitive(verb).and_then(|p| p.actor_kind);
                let Some(counter) = nearest_unit(w, n.side, kind, reactor.position, &[]) else {
                    continue;
                };
                out.push(ActionNode {
                    id,
                    key: format!("{reaction_key}/c{i}"),
                    verb: verb.clone(),
                    side: n.side,
                    actor: counter.id.clone(),
                    kind: node_kind(kb, verb),
                    function: function_of(kb, verb),
                    objective: Objective::Cell(reactor.position),
                    anchor: reactor.position,
                    window: None,
                    route: None,
                    parent: Some(reaction_id),
                    deps: Vec::new(),
                    not_before: None,
                    duration_min: None,
                    origin: Origin::Counteraction,
                    arc_depth: n.arc_depth + 2,
                    arc: Some(ArcProvenance {
                        rule: rule.id,
                        reactor: reactor.id.clone(),
                        distance_km: m.distance_km,
                    }),
                });
                id += 1;
            }
        }
    }
    out
}
