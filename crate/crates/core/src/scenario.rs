//! World model and course-of-action input.
//!
//! A [`Scenario`] is loaded from JSON, checked with [`validate_scenario`], and
//! is immutable afterwards. Coordinates are integer `(row, col)` cell indices;
//! distances are Euclidean over cell centers scaled by `cell_size_km`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use chrono::{Duration, NaiveDateTime};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::violation::{sort_violations, Violation, ViolationCode};

/// Typical COA sizes. Outside this range a warning is emitted, not an error.
pub const TYPICAL_COA_TASKS: std::ops::RangeInclusive<usize> = 2..=20;
/// Hard bounds on COA size.
pub const COA_TASK_LIMITS: std::ops::RangeInclusive<usize> = 1..=64;

const CLOCK_FORMAT: &str = "%Y-%m-%dT%H:%M";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

/// Grid cell, serialized as `[row, col]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct Cell {
    pub row: u32,
    pub col: u32,
}

impl Cell {
    pub const fn new(row: u32, col: u32) -> Self {
        Self { row, col }
    }

    /// Euclidean distance between cell centers, in cells.
    pub fn distance(self, other: Cell) -> f64 {
        let dr = self.row as f64 - other.row as f64;
        let dc = self.col as f64 - other.col as f64;
        (dr * dr + dc * dc).sqrt()
    }
}

impl From<[u32; 2]> for Cell {
    fn from([row, col]: [u32; 2]) -> Self {
        Self { row, col }
    }
}

impl From<Cell> for [u32; 2] {
    fn from(c: Cell) -> Self {
        [c.row, c.col]
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerrainKind {
    Open,
    Urban,
    Forest,
    Water,
    Obstacle,
}

impl TerrainKind {
    pub fn is_impassable(self) -> bool {
        matches!(self, TerrainKind::Water | TerrainKind::Obstacle)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TerrainKind::Open => "open",
            TerrainKind::Urban => "urban",
            TerrainKind::Forest => "forest",
            TerrainKind::Water => "water",
            TerrainKind::Obstacle => "obstacle",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "open" => TerrainKind::Open,
            "urban" => TerrainKind::Urban,
            "forest" => TerrainKind::Forest,
            "water" => TerrainKind::Water,
            "obstacle" => TerrainKind::Obstacle,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerrainCell {
    pub kind: TerrainKind,
    /// Speed multiplier in `[0, 1]`; 0 means impassable.
    pub mobility: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerrainGrid {
    pub width: u32,
    pub height: u32,
    pub cell_size_km: f64,
    /// Row-major.
    pub cells: Vec<TerrainCell>,
}

impl TerrainGrid {
    /// Uniform grid of one terrain kind.
    pub fn uniform(
        width: u32,
        height: u32,
        cell_size_km: f64,
        kind: TerrainKind,
        mobility: f64,
    ) -> Self {
        Self {
            width,
            height,
            cell_size_km,
            cells: vec![TerrainCell { kind, mobility }; (width * height) as usize],
        }
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.row < self.height && c.col < self.width
    }

    pub fn cell(&self, c: Cell) -> Option<&TerrainCell> {
        if !self.contains(c) {
            return None;
        }
        self.cells.get((c.row * self.width + c.col) as usize)
    }

    pub fn cell_mut(&mut self, c: Cell) -> Option<&mut TerrainCell> {
        if !self.contains(c) {
            return None;
        }
        self.cells.get_mut((c.row * self.width + c.col) as usize)
    }

    /// Mobility factor, 0 for out-of-grid cells.
    pub fn mobility(&self, c: Cell) -> f64 {
        self.cell(c).map_or(0.0, |t| t.mobility)
    }

    pub fn is_passable(&self, c: Cell) -> bool {
        self.mobility(c) > 0.0
    }

    pub fn distance_km(&self, a: Cell, b: Cell) -> f64 {
        a.distance(b) * self.cell_size_km
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Friendly,
    Enemy,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Friendly => Side::Enemy,
            Side::Enemy => Side::Friendly,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitKind {
    Armor,
    Infantry,
    Artillery,
    Logistics,
    Engineer,
}

impl UnitKind {
    pub const ALL: [UnitKind; 5] = [
        UnitKind::Armor,
        UnitKind::Infantry,
        UnitKind::Artillery,
        UnitKind::Logistics,
        UnitKind::Engineer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            UnitKind::Armor => "armor",
            UnitKind::Infantry => "infantry",
            UnitKind::Artillery => "artillery",
            UnitKind::Logistics => "logistics",
            UnitKind::Engineer => "engineer",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        UnitKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Echelon {
    Company,
    Battalion,
    Brigade,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Supplies {
    pub fuel_l: f64,
    pub ammo_u: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Unit {
    pub id: String,
    pub side: Side,
    pub kind: UnitKind,
    pub echelon: Echelon,
    /// Abstract combat strength.
    pub strength: f64,
    pub position: Cell,
    pub max_speed_kmh: f64,
    pub weapon_range_km: f64,
    pub supplies: Supplies,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    PhaseLine,
    Axis,
    Objective,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlMeasure {
    pub id: String,
    pub kind: MeasureKind,
    /// Polyline for phase lines and axes, region for objectives.
    pub geometry: Vec<Cell>,
    pub label: String,
}

impl ControlMeasure {
    /// The single cell a task aimed at this measure moves to.
    ///
    /// Axes resolve to their last point, phase lines to their middle point,
    /// objectives to the region cell nearest the region's centroid.
    pub fn anchor(&self) -> Option<Cell> {
        match self.kind {
            MeasureKind::Axis => self.geometry.last().copied(),
            MeasureKind::PhaseLine => self.geometry.get(self.geometry.len() / 2).copied(),
            MeasureKind::Objective => {
                if self.geometry.is_empty() {
                    return None;
                }
                let n = self.geometry.len() as f64;
                let (sr, sc) = self
                    .geometry
                    .iter()
                    .fold((0.0, 0.0), |(r, c), g| (r + g.row as f64, c + g.col as f64));
                let (cr, cc) = (sr / n, sc / n);
                let mut best = self.geometry[0];
                let mut best_d = f64::INFINITY;
                for g in &self.geometry {
                    let d = (g.row as f64 - cr).powi(2) + (g.col as f64 - cc).powi(2);
                    if d < best_d {
                        best_d = d;
                        best = *g;
                    }
                }
                Some(best)
            }
        }
    }
}

/// Several units acting under one COA actor id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceGroup {
    pub id: String,
    pub members: Vec<String>,
}

/// Where a task is aimed: a control measure id or a cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Objective {
    Measure(String),
    Cell(Cell),
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Measure(m) => f.write_str(m),
            Objective::Cell(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HighLevelTask {
    pub id: String,
    pub verb: String,
    /// Unit id or group id.
    pub actor: String,
    pub objective: Objective,
    #[serde(default)]
    pub after: Vec<String>,
}

/// Scenario start time, `YYYY-MM-DDTHH:MM` on the wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClockStart(pub NaiveDateTime);

impl ClockStart {
    pub fn parse(s: &str) -> Option<Self> {
        NaiveDateTime::parse_from_str(s, CLOCK_FORMAT)
            .ok()
            .map(ClockStart)
    }

    /// Wall-clock `HH:MM` label for an offset in minutes.
    pub fn label(&self, offset_min: i64) -> String {
        (self.0 + Duration::minutes(offset_min))
            .format("%H:%M")
            .to_string()
    }
}

impl fmt::Display for ClockStart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format(CLOCK_FORMAT))
    }
}

impl Serialize for ClockStart {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ClockStart {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ClockStart::parse(&s).ok_or_else(|| {
            serde::de::Error::custom(format!("expected YYYY-MM-DDTHH:MM, got {s:?}"))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub clock_start: ClockStart,
    pub terrain: TerrainGrid,
    pub units: Vec<Unit>,
    pub measures: Vec<ControlMeasure>,
    #[serde(default)]
    pub groups: Vec<ForceGroup>,
    pub coa: Vec<HighLevelTask>,
}

impl Scenario {
    pub fn unit(&self, id: &str) -> Option<&Unit> {
        self.units.iter().find(|u| u.id == id)
    }

    pub fn group(&self, id: &str) -> Option<&ForceGroup> {
        self.groups.iter().find(|g| g.id == id)
    }

    pub fn measure(&self, id: &str) -> Option<&ControlMeasure> {
        self.measures.iter().find(|m| m.id == id)
    }

    pub fn task(&self, id: &str) -> Option<&HighLevelTask> {
        self.coa.iter().find(|t| t.id == id)
    }

    /// Unit ids standing behind an actor id: itself for a unit, members for a group.
    pub fn actor_units(&self, actor: &str) -> Option<Vec<&Unit>> {
        if let Some(u) = self.unit(actor) {
            return Some(vec![u]);
        }
        let g = self.group(actor)?;
        g.members.iter().map(|m| self.unit(m)).collect()
    }

    pub fn actor_side(&self, actor: &str) -> Option<Side> {
        self.actor_units(actor)?.first().map(|u| u.side)
    }

    pub fn resolve_objective(&self, o: &Objective) -> Option<Cell> {
        match o {
            Objective::Cell(c) => self.terrain.contains(*c).then_some(*c),
            Objective::Measure(m) => self.measure(m)?.anchor(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

/// Parses a scenario document. Unknown fields are rejected.
pub fn load_scenario(doc: &str) -> Result<Scenario, ScenarioError> {
    // Syntax errors take precedence over schema errors.
    serde_json::from_str::<serde::de::IgnoredAny>(doc).map_err(|e| classify(e, ".".into()))?;
    let mut de = serde_json::Deserializer::from_str(doc);
    let scenario: Scenario = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        classify(e.into_inner(), path)
    })?;
    de.end().map_err(|e| classify(e, ".".into()))?;
    Ok(scenario)
}

fn classify(e: serde_json::Error, path: String) -> ScenarioError {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => ScenarioError::Schema {
            path,
            message: e.to_string(),
        },
        Category::Syntax | Category::Eof | Category::Io => ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
    }
}

/// Lowercase id token `[a-z0-9_-]+`.
pub fn is_id_token(s: &str) -> bool {
    !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_' || b == b'-')
}

/// Verb token `[a-z_][a-z0-9_]*`.
pub fn is_verb_token(s: &str) -> bool {
    let mut bytes = s.bytes();
    matches!(bytes.next(), Some(b) if b.is_ascii_lowercase() || b == b'_')
        && bytes.all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
}

fn finite_at_least(v: f64, min: f64) -> bool {
    v.is_finite() && v >= min
}

fn finite_above(v: f64, min: f64) -> bool {
    v.is_finite() && v > min
}

/// Checks every scenario invariant. Empty iff the scenario is valid.
pub fn validate_scenario(s: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push =
        |code, path: String, message: String| out.push(Violation::new(code, path, message));

    let t = &s.terrain;
    if t.width == 0 || t.height == 0 {
        push(
            ViolationCode::InvalidValue,
            "terrain".into(),
            "grid must be at least 1x1".into(),
        );
    }
    if !finite_above(t.cell_size_km, 0.0) {
        push(
            ViolationCode::InvalidValue,
            "terrain.cell_size_km".into(),
            format!("cell size must be positive, got {}", t.cell_size_km),
        );
    }
    let expected = t.width as usize * t.height as usize;
    if t.cells.len() != expected {
        push(
            ViolationCode::CellCountMismatch,
            "terrain.cells".into(),
            format!("expected {expected} cells, found {}", t.cells.len()),
        );
    }
    for (i, c) in t.cells.iter().enumerate() {
        let path = format!("terrain.cells[{i}].mobility");
        if !(c.mobility.is_finite() && (0.0..=1.0).contains(&c.mobility)) {
            push(
                ViolationCode::InvalidValue,
                path,
                format!("mobility {} outside [0, 1]", c.mobility),
            );
        } else if c.kind.is_impassable() && c.mobility != 0.0 {
            push(
                ViolationCode::MobilityMismatch,
                path,
                format!("{} cell must have mobility 0", c.kind.as_str()),
            );
        } else if !c.kind.is_impassable() && c.mobility == 0.0 {
            push(
                ViolationCode::MobilityMismatch,
                path,
                format!("{} cell must have positive mobility", c.kind.as_str()),
            );
        }
    }

    // Units and groups share the actor namespace.
    let mut actor_ids: HashMap<&str, String> = HashMap::new();
    for (i, u) in s.units.iter().enumerate() {
        let base = format!("units[{i}]");
        if !is_id_token(&u.id) {
            push(
                ViolationCode::InvalidId,
                format!("{base}.id"),
                format!("invalid id {:?}", u.id),
            );
        }
        if let Some(first) = actor_ids.insert(&u.id, base.clone()) {
            push(
                ViolationCode::DuplicateId,
                format!("{base}.id"),
                format!("id {:?} already used at {first}", u.id),
            );
        }
        if !t.contains(u.position) {
            push(
                ViolationCode::OutOfBounds,
                format!("{base}.position"),
                format!("{} outside grid", u.position),
            );
        } else if !t.is_passable(u.position) {
            push(
                ViolationCode::UnitOnImpassable,
                format!("{base}.position"),
                format!("unit {} stands on impassable cell {}", u.id, u.position),
            );
        }
        if !finite_above(u.strength, 0.0) {
            push(
                ViolationCode::InvalidValue,
                format!("{base}.strength"),
                "strength must be positive".into(),
            );
        }
        if !finite_above(u.max_speed_kmh, 0.0) {
            push(
                ViolationCode::InvalidValue,
                format!("{base}.max_speed_kmh"),
                "speed must be positive".into(),
            );
        }
        if !finite_at_least(u.weapon_range_km, 0.0) {
            push(
                ViolationCode::InvalidValue,
                format!("{base}.weapon_range_km"),
                "range must be nonnegative".into(),
            );
        }
        if !finite_at_least(u.supplies.fuel_l, 0.0) {
            push(
                ViolationCode::InvalidValue,
                format!("{base}.supplies.fuel_l"),
                "fuel must be nonnegative".into(),
            );
        }
        if !finite_at_least(u.supplies.ammo_u, 0.0) {
            push(
                ViolationCode::InvalidValue,
                format!("{base}.supplies.ammo_u"),
                "ammo must be nonnegative".into(),
            );
        }
    }

    let mut measure_ids = HashSet::new();
    for (i, m) in s.measures.iter().enumerate() {
        let base = format!("measures[{i}]");
        if !is_id_token(&m.id) {
            push(
                ViolationCode::InvalidId,
                format!("{base}.id"),
                format!("invalid id {:?}", m.id),
            );
        }
        if !measure_ids.insert(m.id.as_str()) {
            push(
                ViolationCode::DuplicateId,
                format!("{base}.id"),
                format!("duplicate measure id {:?}", m.id),
            );
        }
        if m.geometry.is_empty() {
            push(
                ViolationCode::EmptyGeometry,
                format!("{base}.geometry"),
                "geometry is empty".into(),
            );
            continue;
        }
        let mut inside = true;
        for (j, c) in m.geometry.iter().enumerate() {
            if !t.contains(*c) {
                inside = false;
                push(
                    ViolationCode::OutOfBounds,
                    format!("{base}.geometry[{j}]"),
                    format!("{c} outside grid"),
                );
            }
        }
        if inside {
            if let Some(a) = m.anchor() {
                if !t.is_passable(a) {
                    push(
                        ViolationCode::AnchorImpassable,
                        format!("{base}.geometry"),
                        format!("anchor cell {a} of {} is impassable", m.id),
                    );
                }
            }
        }
    }

    for (i, g) in s.groups.iter().enumerate() {
        let base = format!("groups[{i}]");
        if !is_id_token(&g.id) {
            push(
                ViolationCode::InvalidId,
                format!("{base}.id"),
                format!("invalid id {:?}", g.id),
            );
        }
        if let Some(first) = actor_ids.insert(&g.id, base.clone()) {
            push(
                ViolationCode::DuplicateId,
                format!("{base}.id"),
                format!("id {:?} already used at {first}", g.id),
            );
        }
        if g.members.is_empty() {
            push(
                ViolationCode::EmptyGroup,
                format!("{base}.members"),
                "group has no members".into(),
            );
        }
        let mut sides = BTreeSet::new();
        for (j, m) in g.members.iter().enumerate() {
            match s.unit(m) {
                Some(u) => {
                    sides.insert(u.side);
                }
                None => push(
                    ViolationCode::DanglingReference,
                    format!("{base}.members[{j}]"),
                    format!("no unit {m:?}"),
                ),
            }
        }
        if sides.len() > 1 {
            push(
                ViolationCode::MixedSideGroup,
                format!("{base}.members"),
                "group mixes sides".into(),
            );
        }
    }

    if !COA_TASK_LIMITS.contains(&s.coa.len()) {
        push(
            ViolationCode::CoaSize,
            "coa".into(),
            format!(
                "COA has {} tasks; accepted range is {}..={}",
                s.coa.len(),
                COA_TASK_LIMITS.start(),
                COA_TASK_LIMITS.end()
            ),
        );
    }
    let mut task_index: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, task) in s.coa.iter().enumerate() {
        let base = format!("coa[{i}]");
        if !is_id_token(&task.id) {
            push(
                ViolationCode::InvalidId,
                format!("{base}.id"),
                format!("invalid id {:?}", task.id),
            );
        }
        if task_index.insert(&task.id, i).is_some() {
            push(
                ViolationCode::DuplicateId,
                format!("{base}.id"),
                format!("duplicate task id {:?}", task.id),
            );
        }
        if !is_verb_token(&task.verb) {
            push(
                ViolationCode::InvalidId,
                format!("{base}.verb"),
                format!("invalid verb {:?}", task.verb),
            );
        }
        if s.unit(&task.actor).is_none() && s.group(&task.actor).is_none() {
            push(
                ViolationCode::DanglingReference,
                format!("{base}.actor"),
                format!("no unit or group {:?}", task.actor),
            );
        }
        match &task.objective {
            Objective::Measure(m) => {
                if s.measure(m).is_none() {
                    push(
                        ViolationCode::DanglingReference,
                        format!("{base}.objective"),
                        format!("no control measure {m:?}"),
                    );
                }
            }
            Objective::Cell(c) => {
                if !t.contains(*c) {
                    push(
                        ViolationCode::OutOfBounds,
                        format!("{base}.objective"),
                        format!("{c} outside grid"),
                    );
                } else if !t.is_passable(*c) {
                    push(
                        ViolationCode::AnchorImpassable,
                        format!("{base}.objective"),
                        format!("objective cell {c} is impassable"),
                    );
                }
            }
        }
    }
    let mut edges_ok = true;
    for (i, task) in s.coa.iter().enumerate() {
        for (j, dep) in task.after.iter().enumerate() {
            if !task_index.contains_key(dep.as_str()) {
                edges_ok = false;
                push(
                    ViolationCode::DanglingReference,
                    format!("coa[{i}].after[{j}]"),
                    format!("no task {dep:?}"),
                );
            }
        }
    }
    if edges_ok && coa_order(&s.coa).is_none() {
        push(
            ViolationCode::CyclicOrder,
            "coa".into(),
            "task ordering contains a cycle".into(),
        );
    }

    sort_violations(&mut out);
    out
}

/// Non-fatal findings, e.g. a COA size outside the typical range.
pub fn scenario_warnings(s: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();
    if !TYPICAL_COA_TASKS.contains(&s.coa.len()) && COA_TASK_LIMITS.contains(&s.coa.len()) {
        out.push(Violation::new(
            ViolationCode::AtypicalCoaSize,
            "coa",
            format!(
                "COA has {} tasks; typical inputs have {} to {}",
                s.coa.len(),
                TYPICAL_COA_TASKS.start(),
                TYPICAL_COA_TASKS.end()
            ),
        ));
    }
    out
}

/// Topological order of COA task indices, preferring input order among ready tasks.
/// `None` when the after-edges contain a cycle or a dangling reference.
pub fn coa_order(coa: &[HighLevelTask]) -> Option<Vec<usize>> {
    let index: HashMap<&str, usize> = coa
        .iter()
        .enumerate()
        .map(|(i, t)| (t.id.as_str(), i))
        .collect();
    let mut indegree = vec![0usize; coa.len()];
    let mut succ = vec![Vec::new(); coa.len()];
    for (i, t) in coa.iter().enumerate() {
        for dep in &t.after {
            let d = *index.get(dep.as_str())?;
            indegree[i] += 1;
            succ[d].push(i);
        }
    }
    let mut ready: BTreeSet<usize> = (0..coa.len()).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(coa.len());
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &n in &succ[i] {
            indegree[n] -= 1;
            if indegree[n] == 0 {
                ready.insert(n);
            }
        }
    }
    (order.len() == coa.len()).then_some(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_doc() -> &'static str {
        r#"{
            "name": "minimal",
            "clock_start": "2026-05-01T06:00",
            "terrain": {"width": 2, "height": 2, "cell_size_km": 1.0,
                "cells": [{"kind":"open","mobility":1.0},{"kind":"open","mobility":1.0},
                          {"kind":"open","mobility":1.0},{"kind":"open","mobility":1.0}]},
            "units": [{"id":"a1","side":"friendly","kind":"armor","echelon":"company","strength":10,
                       "position":[0,0],"max_speed_kmh":20,"weapon_range_km":3,
                       "supplies":{"fuel_l":500,"ammo_u":100}}],
            "measures": [],
            "coa": [{"id":"t1","verb":"march","actor":"a1","objective":[1,1]}]
        }"#
    }

    #[test]
    fn loads_minimal_document() {
        let s = load_scenario(minimal_doc()).unwrap();
        assert_eq!(s.units.len(), 1);
        assert_eq!(s.coa.len(), 1);
        assert_eq!(s.coa[0].objective, Objective::Cell(Cell::new(1, 1)));
        assert!(validate_scenario(&s).is_empty());
        assert_eq!(scenario_warnings(&s).len(), 1);
    }

    #[test]
    fn malformed_json_is_parse_error() {
        assert!(matches!(
            load_scenario("{"),
            Err(ScenarioError::Parse { .. })
        ));
        assert!(matches!(
            load_scenario("{} x"),
            Err(ScenarioError::Parse { .. })
        ));
    }

    #[test]
    fn unknown_field_is_schema_error_with_path() {
        let doc = minimal_doc().replace("\"strength\":10", "\"strength\":10,\"morale\":3");
        match load_scenario(&doc) {
            Err(ScenarioError::Schema { path, .. }) => assert_eq!(path, "units[0].morale"),
            other => panic!("unexpected {other:?}"),
        }
        let doc = minimal_doc().replace("\"strength\":10", "\"strength\":\"ten\"");
        match load_scenario(&doc) {
            Err(ScenarioError::Schema { path, .. }) => assert_eq!(path, "units[0].strength"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_field_is_schema_error() {
        let doc = minimal_doc().replace("\"name\": \"minimal\",", "");
        assert!(matches!(
            load_scenario(&doc),
            Err(ScenarioError::Schema { .. })
        ));
    }

    #[test]
    fn unit_on_water_is_flagged() {
        let mut s = load_scenario(minimal_doc()).unwrap();
        *s.terrain.cell_mut(Cell::new(0, 0)).unwrap() = TerrainCell {
            kind: TerrainKind::Water,
            mobility: 0.0,
        };
        let v = validate_scenario(&s);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].code, ViolationCode::UnitOnImpassable);
    }

    #[test]
    fn dangling_actor_is_flagged() {
        let mut s = load_scenario(minimal_doc()).unwrap();
        s.coa[0].actor = "tf-zz".into();
        let v = validate_scenario(&s);
        assert_eq!(
            v.iter().map(|v| v.code).collect::<Vec<_>>(),
            vec![ViolationCode::DanglingReference]
        );
        assert_eq!(v[0].path, "coa[0].actor");
    }

    #[test]
    fn cyclic_coa_is_flagged() {
        let mut s = load_scenario(minimal_doc()).unwrap();
        let mut t2 = s.coa[0].clone();
        t2.id = "t2".into();
        t2.after = vec!["t1".into()];
        s.coa[0].after = vec!["t2".into()];
        s.coa.push(t2);
        let v = validate_scenario(&s);
        assert_eq!(
            v.iter().map(|v| v.code).collect::<Vec<_>>(),
            vec![ViolationCode::CyclicOrder]
        );
    }

    #[test]
    fn mobility_must_match_kind() {
        let mut s = load_scenario(minimal_doc()).unwrap();
        s.terrain.cells[3] = TerrainCell {
            kind: TerrainKind::Obstacle,
            mobility: 0.4,
        };
        s.terrain.cells[2].mobility = 0.0;
        let codes: Vec<_> = validate_scenario(&s)
            .into_iter()
            .map(|v| (v.code, v.path))
            .collect();
        assert_eq!(
            codes,
            vec![
                (
                    ViolationCode::MobilityMismatch,
                    "terrain.cells[2].mobility".to_string()
                ),
                (
                    ViolationCode::MobilityMismatch,
                    "terrain.cells[3].mobility".to_string()
                ),
            ]
        );
    }

    #[test]
    fn coa_order_prefers_input_order() {
        let mut s = load_scenario(minimal_doc()).unwrap();
        let base = s.coa[0].clone();
        s.coa = ["a", "b", "c"]
            .iter()
            .map(|id| HighLevelTask {
                id: id.to_string(),
                ..base.clone()
            })
            .collect();
        s.coa[0].after = vec!["c".into()];
        assert_eq!(coa_order(&s.coa), Some(vec![1, 2, 0]));
    }

    #[test]
    fn anchors() {
        let line = ControlMeasure {
            id: "pl".into(),
            kind: MeasureKind::PhaseLine,
            geometry: vec![Cell::new(0, 5), Cell::new(1, 5), Cell::new(2, 5)],
            label: "PL".into(),
        };
        assert_eq!(line.anchor(), Some(Cell::new(1, 5)));
        let obj = ControlMeasure {
            kind: MeasureKind::Objective,
            geometry: vec![
                Cell::new(0, 0),
                Cell::new(0, 1),
                Cell::new(1, 0),
                Cell::new(1, 1),
                Cell::new(2, 2),
            ],
            ..line.clone()
        };
        assert_eq!(obj.anchor(), Some(Cell::new(1, 1)));
        let axis = ControlMeasure {
            kind: MeasureKind::Axis,
            ..line
        };
        assert_eq!(axis.anchor(), Some(Cell::new(2, 5)));
    }

    #[test]
    fn clock_labels() {
        let c = ClockStart::parse("2026-05-01T06:00").unwrap();
        assert_eq!(c.label(0), "06:00");
        assert_eq!(c.label(195), "09:15");
        assert_eq!(c.to_string(), "2026-05-01T06:00");
    }
}
