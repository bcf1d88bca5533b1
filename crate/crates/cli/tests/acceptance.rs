//! Acceptance runner: prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

#[path = "../../core/tests/oracles/mod.rs"]
mod oracles;

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use coaplan_core::combat::{integrate, resolve_engagement};
use coaplan_core::plan::Origin;
use coaplan_core::routing::plan_route;
use coaplan_core::scenario::Cell;
use coaplan_core::{
    check_consistency, expand_coa, load_scenario, parse_kb, validate_scenario, KnowledgeBase,
    PlannerConfig, Scenario,
};
use oracles::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const FIXTURES: [(&str, &str); 3] = [
    ("delta-offense.json", "brigade.kb"),
    ("fpol-scenario.json", "fpol.kb"),
    ("minimal.json", "brigade.kb"),
];

fn load(s: &str, k: &str) -> (Scenario, KnowledgeBase) {
    (
        load_scenario(&read_fixture(s)).expect("fixture scenario"),
        parse_kb(&read_fixture(k)).expect("fixture kb"),
    )
}

fn scale() -> Outcome {
    let (s, kb) = load("delta-offense.json", "brigade.kb");
    let golden: usize = read_fixture("golden/delta-offense.node_count")
        .trim()
        .parse()
        .map_err(|e| format!("golden count: {e}"))?;
    let p = expand_coa(&s, &kb, &PlannerConfig::default()).map_err(|e| e.to_string())?;
    let n = p.nodes.len();
    let msg = format!("{} tasks -> {n} nodes (golden {golden})", s.coa.len());
    if (50..=500).contains(&n) && n == golden {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn latency() -> Outcome {
    let mut parts = Vec::new();
    let mut worst = Duration::ZERO;
    for (s, k) in FIXTURES {
        let (sc, kb) = load(s, k);
        let t = Instant::now();
        expand_coa(&sc, &kb, &PlannerConfig::default()).map_err(|e| format!("{s}: {e}"))?;
        let d = t.elapsed();
        worst = worst.max(d);
        parts.push(format!("{s} {:.1} ms", d.as_secs_f64() * 1e3));
    }
    let msg = parts.join(", ");
    if worst < Duration::from_secs(20) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn arc_walkthrough() -> Outcome {
    let (mut s, kb) = load("fpol-scenario.json", "fpol.kb");
    let cfg = PlannerConfig::default();
    let p = expand_coa(&s, &kb, &cfg).map_err(|e| e.to_string())?;
    let reactions: Vec<_> = p
        .nodes
        .iter()
        .filter(|n| n.origin == Origin::Reaction)
        .collect();
    if reactions.len() != 1 || reactions[0].verb != "artillery_fire" {
        return Err(format!("{} reactions in radius", reactions.len()));
    }
    let counters = p
        .nodes
        .iter()
        .filter(|n| n.origin == Origin::Counteraction && n.parent == Some(reactions[0].id))
        .count();
    if counters == 0 {
        return Err("reaction has no counteraction".into());
    }
    let ea = s
        .units
        .iter_mut()
        .find(|u| u.id == "ea-1")
        .ok_or("ea-1 missing")?;
    ea.position = Cell::new(5, 14);
    let far = expand_coa(&s, &kb, &cfg).map_err(|e| e.to_string())?;
    let far_reactions = far
        .nodes
        .iter()
        .filter(|n| n.origin == Origin::Reaction)
        .count();
    let msg = format!(
        "in radius: 1 artillery_fire, {counters} counter; beyond radius: {far_reactions} reactions"
    );
    if far_reactions == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn soundness() -> Outcome {
    let kb = parse_kb(&random_kb_text()).map_err(|e| e.to_string())?;
    let mut nodes = 0;
    for seed in 0..200u64 {
        let s = random_scenario(&mut ChaCha8Rng::seed_from_u64(seed), seed);
        let v = validate_scenario(&s);
        if !v.is_empty() {
            return Err(format!(
                "seed {seed}: generator produced invalid scenario: {}",
                v[0]
            ));
        }
        let p = expand_coa(&s, &kb, &PlannerConfig::default())
            .map_err(|e| format!("seed {seed}: {e}"))?;
        let v = check_consistency(&p);
        if let Some(first) = v.first() {
            return Err(format!(
                "seed {seed}: {} violations, first {first}",
                v.len()
            ));
        }
        nodes += p.nodes.len();
    }
    Ok(format!(
        "200 random scenarios, {nodes} nodes, no violations"
    ))
}

fn routing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut routed = 0;
    for i in 0..100 {
        let g = random_grid(&mut rng, 20, 20, 0.2);
        let comp = largest_component(&g);
        let a = comp[rng.gen_range(0..comp.len())];
        let b = comp[rng.gen_range(0..comp.len())];
        let oracle = dijkstra_cost(&g, a, b).ok_or(format!("grid {i}: oracle found no path"))?;
        let r = plan_route(&g, a, b).map_err(|e| format!("grid {i}: {e}"))?;
        let engine = (r.cost * 1e6).round() as u64;
        if engine != oracle {
            return Err(format!(
                "grid {i}: {a} to {b} engine {engine} oracle {oracle} micro-km"
            ));
        }
        routed += 1;
    }
    Ok(format!("{routed}/100 grids equal"))
}

fn lanchester() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let (mut drift, mut err) = (0.0f64, 0.0f64);
    for i in 0..1000 {
        let e = random_engagement(&mut rng);
        let c = |b: f64, r: f64| e.red_kill_rate * r * r - e.blue_kill_rate * b * b;
        let scale = (e.red_kill_rate * e.red_strength.powi(2))
            .max(e.blue_kill_rate * e.blue_strength.powi(2))
            .max(f64::MIN_POSITIVE);
        let c0 = c(e.blue_strength, e.red_strength);
        integrate(&e, |_, b, r| {
            drift = drift.max((c(b, r) - c0).abs() / scale)
        });
        let a = resolve_engagement(&e);
        let (rb, rr) = reference_losses(&e);
        let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(1.0);
        err = err.max(rel(a.blue_loss, rb)).max(rel(a.red_loss, rr));
        if drift > 1e-6 || err > 1e-3 {
            return Err(format!(
                "spec {i} {e:?}: drift {drift:.2e}, loss error {err:.2e}"
            ));
        }
    }
    Ok(format!("max drift {drift:.2e}, max loss error {err:.2e}"))
}

fn run_cli(dir: &Path) -> Result<(Vec<u8>, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_coaplan"))
        .arg("plan")
        .arg(fixture("delta-offense.json"))
        .arg(fixture("brigade.kb"))
        .arg("--out")
        .arg(dir.join("plan.json"))
        .arg("--matrix")
        .arg(dir.join("matrix.csv"))
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let read = |f: &str| std::fs::read(dir.join(f)).map_err(|e| e.to_string());
    Ok((read("plan.json")?, read("matrix.csv")?))
}

fn determinism() -> Outcome {
    let base = std::env::temp_dir().join(format!("coaplan-acceptance-{}", std::process::id()));
    let (a, b) = (base.join("a"), base.join("b"));
    for d in [&a, &b] {
        std::fs::create_dir_all(d).map_err(|e| e.to_string())?;
    }
    let first = run_cli(&a);
    let second = run_cli(&b);
    let _ = std::fs::remove_dir_all(&base);
    let ((p1, m1), (p2, m2)) = (first?, second?);
    let msg = format!("plan {} bytes, matrix {} bytes", p1.len(), m1.len());
    if p1 == p2 && m1 == m2 {
        Ok(msg)
    } else {
        Err(format!("outputs differ ({msg})"))
    }
}

/// Twenty single-rule additions spread over the two fixture KBs.
fn augmentations() -> Vec<(&'static str, &'static str, String)> {
    let brigade_rules = [
        "reaction on screen by enemy infantry within 10 km do ambush;",
        "reaction on screen by enemy armor within 20 km do counterattack_by_fire counter suppress;",
        "reaction on consolidate by enemy armor within 12 km do counterattack_by_fire counter suppress;",
        "reaction on consolidate by enemy artillery within 25 km do artillery_fire;",
        "reaction on recon_route by enemy artillery within 15 km do artillery_fire;",
        "reaction on recon_route by enemy infantry within 10 km do ambush counter suppress;",
        "reaction on hasty_defense by enemy artillery within 25 km do suppress counter counter_battery_fire;",
        "reaction on issue_orders by enemy artillery within 30 km do artillery_fire;",
        "reaction on assume_positions by enemy artillery within 20 km do artillery_fire counter counter_battery_fire;",
        "reaction on occupy_passage_point by enemy infantry within 15 km do ambush;",
        "reaction on attack by enemy artillery within 30 km do artillery_fire counter counter_battery_fire;",
        "reaction on breach by enemy armor within 15 km do counterattack_by_fire;",
        "reaction on pass_through by enemy armor within 12 km do counterattack_by_fire counter suppress;",
        "reaction on counter_battery_fire by enemy artillery within 30 km do counter_battery_fire;",
    ];
    let fpol_rules = [
        "reaction on tactical_march by enemy artillery within 20 km do artillery_fire;",
        "reaction on pass_through by enemy artillery within 15 km do artillery_fire counter counter_battery_fire;",
        "reaction on occupy_passage_point by enemy artillery within 14 km do artillery_fire;",
        "reaction on assume_positions by enemy artillery within 40 km do artillery_fire counter counter_battery_fire;",
        "reaction on artillery_fire by enemy artillery within 30 km do counter_battery_fire;",
        "reaction on forward_passage_of_lines by enemy armor within 20 km do artillery_fire;",
    ];
    brigade_rules
        .iter()
        .map(|r| ("delta-offense.json", "brigade.kb", r.to_string()))
        .chain(
            fpol_rules
                .iter()
                .map(|r| ("fpol-scenario.json", "fpol.kb", r.to_string())),
        )
        .collect()
}

fn monotone() -> Outcome {
    let cfg = PlannerConfig::default();
    let cases = augmentations();
    let mut grew = 0;
    for (i, (s, k, rule)) in cases.iter().enumerate() {
        let (sc, kb) = load(s, k);
        let before = expand_coa(&sc, &kb, &cfg).map_err(|e| format!("case {i}: {e}"))?;
        let text = format!("{}\n{rule}\n", read_fixture(k));
        let kb2 = parse_kb(&text).map_err(|e| format!("case {i}: {e}"))?;
        let after = expand_coa(&sc, &kb2, &cfg).map_err(|e| format!("case {i}: {e}"))?;
        if after.nodes.len() < before.nodes.len() {
            return Err(format!(
                "case {i} ({k} + `{rule}`): {} -> {} nodes",
                before.nodes.len(),
                after.nodes.len()
            ));
        }
        grew += usize::from(after.nodes.len() > before.nodes.len());
    }
    Ok(format!(
        "{} augmentations, none shrank, {grew} grew",
        cases.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("scale", scale),
        ("latency", latency),
        ("arc-walkthrough", arc_walkthrough),
        ("planner-soundness", soundness),
        ("routing-oracle", routing),
        ("lanchester", lanchester),
        ("determinism", determinism),
        ("monotone", monotone),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
