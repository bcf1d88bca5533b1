use std::fmt::Write;

use super::*;

/// Canonical text form: primitives, then templates (both by verb), then
/// reaction rules in id order. `parse_kb(&render_kb(kb)) == kb`.
pub fn render_kb(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    for p in kb.primitives.values() {
        write!(
            out,
            "primitive {} dur {} min fn {}",
            p.verb,
            p.duration_min,
            p.function.as_str()
        )
        .unwrap();
        if p.engages {
            out.push_str(" engages");
        }
        if p.moves {
            out.push_str(" moves");
        }
        if let Some(k) = p.actor_kind {
            write!(out, " by {}", k.as_str()).unwrap();
        }
        let opts = [
            ("fuel", p.rates.fuel_l_per_min),
            ("ammo", p.rates.ammo_u_per_min),
            ("kill", p.kill_rate),
            ("return", p.return_rate),
        ];
        for (name, v) in opts {
            if v != 0.0 {
                write!(out, " {name} {v}").unwrap();
            }
        }
        out.push_str(";\n");
    }
    for t in kb.templates.values() {
        writeln!(out, "\nactivity {} {{", t.verb).unwrap();
        if let Some(c) = &t.when {
            let atoms: Vec<String> = c.atoms.iter().map(render_atom).collect();
            writeln!(out, "    when {}", atoms.join(" and ")).unwrap();
        }
        out.push_str("    subtasks {\n");
        for s in &t.subtasks {
            let actor = match &s.actor_role {
                ActorRole::SelfActor => "self".to_string(),
                ActorRole::PassedUnit => "passed_unit".to_string(),
                ActorRole::NearestOf { kind, side } => {
                    format!("nearest_of({}, {})", kind.as_str(), side.as_str())
                }
            };
            let objective = match &s.objective_role {
                ObjectiveRole::Inherit => "inherit".to_string(),
                ObjectiveRole::Anchor => "anchor".to_string(),
                ObjectiveRole::Measure(m) => format!("measure \"{m}\""),
            };
            write!(out, "        {}({actor}, {objective})", s.verb).unwrap();
            match &s.order {
                SubtaskOrder::After(n) => write!(out, " after {n}").unwrap(),
                SubtaskOrder::With(n) => write!(out, " with {n}").unwrap(),
                SubtaskOrder::Free => {}
            }
            if let Some(d) = s.duration_min {
                write!(out, " dur {d} min").unwrap();
            }
            if let Some(f) = s.function {
                write!(out, " fn {}", f.as_str()).unwrap();
            }
            writeln!(out, " as {};", s.name).unwrap();
        }
        out.push_str("    }\n}\n");
    }
    if !kb.rules.is_empty() {
        out.push('\n');
    }
    for r in &kb.rules {
        write!(
            out,
            "reaction on {} by {} {} within {} km do {}",
            r.trigger_verb,
            r.reactor.side.as_str(),
            r.reactor.kind.as_str(),
            r.reactor.within_km,
            r.reaction_verb
        )
        .unwrap();
        if !r.counter_verbs.is_empty() {
            write!(out, " counter {}", r.counter_verbs.join(", ")).unwrap();
        }
        out.push_str(";\n");
    }
    out
}

fn render_atom(a: &Atom) -> String {
    match a {
        Atom::ExistsUnit {
            side,
            kind,
            within_km,
        } => {
            format!(
                "exists_unit({}, {}, within {within_km} km)",
                side.as_str(),
                kind.as_str()
            )
        }
        Atom::ActorHasSupply { resource, min } => {
            let r = match resource {
                Resource::Fuel => "fuel",
                Resource::Ammo => "ammo",
            };
            format!("actor_has_supply({r}, {min})")
        }
        Atom::TerrainAt { kind } => format!("terrain_at(anchor, {})", kind.as_str()),
    }
}
