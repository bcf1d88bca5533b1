//! Knowledge base: activity templates (decomposition methods), primitive
//! actions with their duration and consumption models, and
//! action-reaction-counteraction rules.
//!
//! The text form is a small DSL, see [`parse_kb`]. Definitions carry the
//! line/column they were parsed from for diagnostics.

mod condition;
mod lexer;
mod parser;
mod render;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scenario::{Side, TerrainKind, UnitKind};

pub use condition::eval_condition;
pub use parser::parse_kb;
pub use render::render_kb;

/// Source position. Positions are diagnostics only: two spans always compare
/// equal so that structurally identical knowledge bases are equal regardless
/// of layout.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
    /// Byte offset into the source text.
    pub offset: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Error)]
pub enum KbError {
    #[error("{span}: {message}")]
    Lex { span: Span, message: String },
    #[error("{span}: expected {expected}, found {found}")]
    Syntax {
        span: Span,
        expected: String,
        found: String,
    },
    #[error("{span}: duplicate definition of {name:?} (first defined at {first})")]
    DuplicateDefinition {
        span: Span,
        name: String,
        first: Span,
    },
    #[error("{span}: unresolved verb {verb:?}")]
    UnresolvedVerb { span: Span, verb: String },
    #[error("{span}: {name:?} does not name a sibling subtask")]
    UnresolvedName { span: Span, name: String },
    #[error("{span}: subtask order of {verb:?} is cyclic")]
    CyclicOrder { span: Span, verb: String },
}

impl KbError {
    pub fn span(&self) -> Span {
        match self {
            KbError::Lex { span, .. }
            | KbError::Syntax { span, .. }
            | KbError::DuplicateDefinition { span, .. }
            | KbError::UnresolvedVerb { span, .. }
            | KbError::UnresolvedName { span, .. }
            | KbError::CyclicOrder { span, .. } => *span,
        }
    }
}

/// Side named relative to the acting side: `friendly` is the actor's own
/// side, `enemy` the opposing one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SideRef {
    Friendly,
    Enemy,
}

impl SideRef {
    pub fn resolve(self, acting: Side) -> Side {
        match self {
            SideRef::Friendly => acting,
            SideRef::Enemy => acting.opposite(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SideRef::Friendly => "friendly",
            SideRef::Enemy => "enemy",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Resource {
    Fuel,
    Ammo,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Atom {
    ExistsUnit {
        side: SideRef,
        kind: UnitKind,
        within_km: f64,
    },
    ActorHasSupply {
        resource: Resource,
        min: f64,
    },
    TerrainAt {
        kind: TerrainKind,
    },
}

/// Conjunction of atoms. An empty conjunction is true.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ConditionExpr {
    pub atoms: Vec<Atom>,
}

/// Staff function an action belongs to; the row of the synchronization matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BattlefieldFunction {
    Security,
    Intelligence,
    Maneuver,
    Fires,
    Mobility,
    Logistics,
    Command,
}

impl BattlefieldFunction {
    /// Default matrix row order.
    pub const ALL: [BattlefieldFunction; 7] = [
        BattlefieldFunction::Security,
        BattlefieldFunction::Intelligence,
        BattlefieldFunction::Maneuver,
        BattlefieldFunction::Fires,
        BattlefieldFunction::Mobility,
        BattlefieldFunction::Logistics,
        BattlefieldFunction::Command,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BattlefieldFunction::Security => "security",
            BattlefieldFunction::Intelligence => "intelligence",
            BattlefieldFunction::Maneuver => "maneuver",
            BattlefieldFunction::Fires => "fires",
            BattlefieldFunction::Mobility => "mobility",
            BattlefieldFunction::Logistics => "logistics",
            BattlefieldFunction::Command => "command",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.as_str() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ActorRole {
    /// The parent's actor.
    SelfActor,
    /// The nearest other unit of the actor's side to the anchor: the unit
    /// whose lines are being passed.
    PassedUnit,
    NearestOf {
        kind: UnitKind,
        side: SideRef,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ObjectiveRole {
    /// Parent's objective, unchanged.
    Inherit,
    /// Parent's objective resolved to its anchor cell.
    Anchor,
    /// A control measure by id.
    Measure(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum SubtaskOrder {
    After(String),
    With(String),
    Free,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubtaskSpec {
    /// Local name, used by `after`/`with` references.
    pub name: String,
    pub verb: String,
    pub actor_role: ActorRole,
    pub objective_role: ObjectiveRole,
    pub order: SubtaskOrder,
    /// Overrides the primitive's duration.
    pub duration_min: Option<u32>,
    /// Overrides the function the verb would otherwise get.
    pub function: Option<BattlefieldFunction>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActivityTemplate {
    pub verb: String,
    pub when: Option<ConditionExpr>,
    pub subtasks: Vec<SubtaskSpec>,
    pub span: Span,
}

impl ActivityTemplate {
    /// Subtask indices in a topological order of the `after`/`with`
    /// references, declaration order among unconstrained subtasks.
    pub fn subtask_order(&self) -> Option<Vec<usize>> {
        let n = self.subtasks.len();
        let idx = |name: &str| self.subtasks.iter().position(|s| s.name == name);
        let mut indegree = vec![0usize; n];
        let mut succ = vec![Vec::new(); n];
        for (i, s) in self.subtasks.iter().enumerate() {
            if let SubtaskOrder::After(r) | SubtaskOrder::With(r) = &s.order {
                let p = idx(r)?;
                indegree[i] += 1;
                succ[p].push(i);
            }
        }
        let mut ready: std::collections::BTreeSet<usize> =
            (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_first() {
            order.push(i);
            for &s in &succ[i] {
                indegree[s] -= 1;
                if indegree[s] == 0 {
                    ready.insert(s);
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

/// Per-minute consumption of a primitive action.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct RateTable {
    pub fuel_l_per_min: f64,
    pub ammo_u_per_min: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Primitive {
    pub verb: String,
    /// Fixed duration; for moving primitives, the minimum duration.
    pub duration_min: u32,
    pub function: BattlefieldFunction,
    /// Fights the nearest opposing unit in weapon range.
    pub engages: bool,
    /// Travels to the objective; duration comes from the route.
    pub moves: bool,
    /// Unit kind required of a performer chosen by the planner.
    pub actor_kind: Option<UnitKind>,
    pub rates: RateTable,
    /// Attrition coefficient of the performer against its target, per minute.
    pub kill_rate: f64,
    /// Attrition coefficient of the target against the performer, per minute.
    pub return_rate: f64,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReactorSpec {
    pub side: SideRef,
    pub kind: UnitKind,
    pub within_km: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArcRule {
    /// Position among all rules of the knowledge base, in file order.
    pub id: usize,
    pub trigger_verb: String,
    pub reactor: ReactorSpec,
    pub reaction_verb: String,
    pub counter_verbs: Vec<String>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct KnowledgeBase {
    pub templates: BTreeMap<String, ActivityTemplate>,
    pub primitives: BTreeMap<String, Primitive>,
    /// All rules in file order; `rules[i].id == i`.
    pub rules: Vec<ArcRule>,
}

impl KnowledgeBase {
    /// Template for a verb; `None` for primitive and unknown verbs.
    pub fn lookup_template(&self, verb: &str) -> Option<&ActivityTemplate> {
        self.templates.get(verb)
    }

    pub fn primitive(&self, verb: &str) -> Option<&Primitive> {
        self.primitives.get(verb)
    }

    pub fn defines(&self, verb: &str) -> bool {
        self.templates.contains_key(verb) || self.primitives.contains_key(verb)
    }

    /// Rules triggered by a verb, in file order.
    pub fn arc_rules<'a>(&'a self, trigger: &'a str) -> impl Iterator<Item = &'a ArcRule> + 'a {
        self.rules.iter().filter(move |r| r.trigger_verb == trigger)
    }
}
