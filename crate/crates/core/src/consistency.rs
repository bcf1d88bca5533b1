//! Independent feasibility check of a finished plan.

use std::collections::{BTreeMap, HashMap};

use crate::plan::{NodeKind, Plan};
use crate::violation::{sort_violations, Violation, ViolationCode};

const EPS: f64 = 1e-9;

/// Every way `p` is not executable as written. Empty iff the dependency and
/// parent graphs are acyclic, every node is scheduled within its release
/// time and after its dependencies, no unit is double-booked and the ledgers
/// keep every strength and stock non-negative.
pub fn check_consistency(p: &Plan) -> Vec<Violation> {
    let mut out = Vec::new();
    let index: HashMap<u32, usize> = p.nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();

    for (i, n) in p.nodes.iter().enumerate() {
        let path = format!("nodes/{i}");
        match n.window {
            None => out.push(Violation::new(
                ViolationCode::Unscheduled,
                &path,
                format!("{} has no window", n.key),
            )),
            Some(w) => {
                if w.end_min < w.start_min {
                    out.push(Violation::new(
                        ViolationCode::InvertedWindow,
                        &path,
                        format!(
                            "{} ends at {} before its start {}",
                            n.key, w.end_min, w.start_min
                        ),
                    ));
                }
                if let Some(nb) = n.not_before.filter(|&nb| w.start_min < nb) {
                    out.push(Violation::new(
                        ViolationCode::ReleaseViolated,
                        &path,
                        format!(
                            "{} starts at {} before its release {nb}",
                            n.key, w.start_min
                        ),
                    ));
                }
            }
        }
        if n.arc_depth > p.config.arc_depth_cap {
            out.push(Violation::new(
                ViolationCode::ArcDepthExceeded,
                &path,
                format!(
                    "{} has ARC depth {} over the cap {}",
                    n.key, n.arc_depth, p.config.arc_depth_cap
                ),
            ));
        }
        for (j, d) in n.deps.iter().enumerate() {
            let dpath = format!("{path}/deps/{j}");
            let Some(&k) = index.get(d) else {
                out.push(Violation::new(
                    ViolationCode::DanglingReference,
                    dpath,
                    format!("unknown node {d}"),
                ));
                continue;
            };
            if let (Some(pw), Some(w)) = (p.nodes[k].window, n.window) {
                if pw.end_min > w.start_min {
                    out.push(Violation::new(
                        ViolationCode::DependencyViolated,
                        dpath,
                        format!(
                            "{} starts at {} before {} ends at {}",
                            n.key, w.start_min, p.nodes[k].key, pw.end_min
                        ),
                    ));
                }
            }
        }
        if let Some(parent) = n.parent {
            if !index.contains_key(&parent) {
                out.push(Violation::new(
                    ViolationCode::DanglingReference,
                    format!("{path}/parent"),
                    format!("unknown node {parent}"),
                ));
            }
        }
    }

    // Dependency cycles: Kahn's algorithm leaves the cyclic nodes unvisited.
    let mut indegree = vec![0usize; p.nodes.len()];
    let mut succ = vec![Vec::new(); p.nodes.len()];
    for (i, n) in p.nodes.iter().enumerate() {
        for d in n.deps.iter().filter_map(|d| index.get(d)) {
            indegree[i] += 1;
            succ[*d].push(i);
        }
    }
    let mut queue: Vec<usize> = (0..p.nodes.len()).filter(|&i| indegree[i] == 0).collect();
    let mut seen = 0;
    while let Some(i) = queue.pop() {
        seen += 1;
        for &s in &succ[i] {
            indegree[s] -= 1;
            if indegree[s] == 0 {
                queue.push(s);
            }
        }
    }
    if seen < p.nodes.len() {
        for (i, n) in p.nodes.iter().enumerate().filter(|(i, _)| indegree[*i] > 0) {
            out.push(Violation::new(
                ViolationCode::CyclicDependency,
                format!("nodes/{i}/deps"),
                format!("{} is on a dependency cycle", n.key),
            ));
        }
    }

    for (i, n) in p.nodes.iter().enumerate() {
        let mut cur = n.parent;
        let mut steps = 0;
        while let Some(c) = cur.and_then(|c| index.get(&c)) {
            if *c == i || steps > p.nodes.len() {
                out.push(Violation::new(
                    ViolationCode::CyclicParent,
                    format!("nodes/{i}/parent"),
                    format!("{} is its own ancestor", n.key),
                ));
                break;
            }
            cur = p.nodes[*c].parent;
            steps += 1;
        }
    }

    let mut by_unit: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, n) in p.nodes.iter().enumerate() {
        if n.kind == NodeKind::Primitive && n.window.is_some_and(|w| w.end_min > w.start_min) {
            by_unit.entry(n.actor.as_str()).or_default().push(i);
        }
    }
    for (unit, mut list) in by_unit {
        list.sort_by_key(|&i| (p.nodes[i].window.unwrap().start_min, i));
        for pair in list.windows(2) {
            let (a, b) = (&p.nodes[pair[0]], &p.nodes[pair[1]]);
            if a.window.unwrap().end_min > b.window.unwrap().start_min {
                out.push(Violation::new(
                    ViolationCode::DoubleBooking,
                    format!("nodes/{}", pair[1]),
                    format!("{unit} is busy with {} while {} starts", a.key, b.key),
                ));
            }
        }
    }

    for (i, f) in p.forces.iter().enumerate() {
        let lost: f64 = p
            .attrition_ledger
            .iter()
            .map(|a| {
                (if a.actor == f.id { a.blue_loss } else { 0.0 })
                    + (if a.target == f.id { a.red_loss } else { 0.0 })
            })
            .sum();
        if f.strength - lost < -EPS {
            out.push(Violation::new(
                ViolationCode::NegativeStrength,
                format!("forces/{i}"),
                format!("{} loses {lost} of strength {}", f.id, f.strength),
            ));
        }
        let (fuel, ammo) = p
            .supply_ledger
            .iter()
            .filter(|d| d.unit == f.id)
            .fold((0.0, 0.0), |(x, y), d| (x + d.fuel_l, y + d.ammo_u));
        if f.fuel_l - fuel < -EPS || f.ammo_u - ammo < -EPS {
            out.push(Violation::new(
                ViolationCode::ShortfallViolation,
                format!("forces/{i}"),
                format!(
                    "{} consumes {fuel} L and {ammo} u of {} L and {} u",
                    f.id, f.fuel_l, f.ammo_u
                ),
            ));
        }
    }

    sort_violations(&mut out);
    out
}
