//! Append-only store of scenarios and plan versions.
//!
//! Every version keeps the serialized plan, the scenario it was planned from
//! and the version it was derived from. Nothing stored is ever changed.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::plan::Plan;
use crate::scenario::Scenario;

#[derive(Clone, Debug)]
pub struct StoredVersion {
    pub json: Arc<str>,
    pub parent: Option<u32>,
    pub scenario: Arc<Scenario>,
}

#[derive(Debug, Default)]
pub struct PlanStore {
    scenarios: BTreeMap<String, Arc<Scenario>>,
    plans: BTreeMap<String, BTreeMap<u32, StoredVersion>>,
}

impl PlanStore {
    pub fn add_scenario(&mut self, s: Scenario) -> String {
        let id = format!("s{}", self.scenarios.len() + 1);
        self.scenarios.insert(id.clone(), Arc::new(s));
        id
    }

    pub fn scenario(&self, id: &str) -> Option<Arc<Scenario>> {
        self.scenarios.get(id).cloned()
    }

    /// Stores `plan` as version 1 of a new plan id.
    pub fn create(&mut self, scenario: Arc<Scenario>, mut plan: Plan) -> (String, u32) {
        let id = format!("p{}", self.plans.len() + 1);
        plan.version = 1;
        let v = StoredVersion {
            json: plan.to_json().into(),
            parent: None,
            scenario,
        };
        self.plans.insert(id.clone(), BTreeMap::from([(1, v)]));
        (id, 1)
    }

    /// Stores `plan` as the next version of `id`, derived from `parent`.
    /// `None` if the plan or the parent version is unknown.
    pub fn append(
        &mut self,
        id: &str,
        parent: u32,
        scenario: Arc<Scenario>,
        mut plan: Plan,
    ) -> Option<u32> {
        let versions = self.plans.get_mut(id)?;
        versions.get(&parent)?;
        let v = versions.keys().next_back().copied().unwrap_or(0) + 1;
        plan.version = v;
        versions.insert(
            v,
            StoredVersion {
                json: plan.to_json().into(),
                parent: Some(parent),
                scenario,
            },
        );
        Some(v)
    }

    pub fn get(&self, id: &str, version: u32) -> Option<&StoredVersion> {
        self.plans.get(id)?.get(&version)
    }

    pub fn versions(&self, id: &str) -> Option<Vec<(u32, Option<u32>)>> {
        Some(
            self.plans
                .get(id)?
                .iter()
                .map(|(v, s)| (*v, s.parent))
                .collect(),
        )
    }
}
