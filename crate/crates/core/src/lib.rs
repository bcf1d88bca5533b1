//! Course-of-action expansion: hierarchical decomposition interleaved with
//! action-reaction-counteraction generation, routing, scheduling and
//! attrition and supply estimates.

pub mod arc;
pub mod combat;
pub mod consistency;
pub mod kb;
pub mod matrix;
pub mod plan;
pub mod planner;
pub mod routing;
pub mod scenario;
pub mod scheduler;
pub mod store;
pub mod timeline;
pub mod violation;
pub mod world;

pub use consistency::check_consistency;
pub use kb::{parse_kb, KnowledgeBase};
pub use matrix::{build_sync_matrix, export_matrix, MatrixFormat, SynchronizationMatrix};
pub use plan::{ActionNode, Plan};
pub use planner::{expand_coa, replan_with_edits, Edit, EditSet, PlanError, PlannerConfig};
pub use scenario::{load_scenario, validate_scenario, Scenario};
pub use violation::{Violation, ViolationCode};
