//! HTTP/JSON service over the planner and the plan store.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use coaplan_core::matrix::{build_sync_matrix, export_matrix, MatrixFormat};
use coaplan_core::scenario::{load_scenario, scenario_warnings, validate_scenario, ScenarioError};
use coaplan_core::store::PlanStore;
use coaplan_core::timeline::build_timeline;
use coaplan_core::{
    expand_coa, replan_with_edits, EditSet, KnowledgeBase, Plan, PlanError, PlannerConfig,
    Violation,
};

pub struct AppState {
    pub kb: KnowledgeBase,
    pub cfg: PlannerConfig,
    store: Mutex<PlanStore>,
    /// Serializes replanning per plan id.
    jobs: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
}

impl AppState {
    pub fn new(kb: KnowledgeBase, cfg: PlannerConfig) -> Arc<Self> {
        Arc::new(Self {
            kb,
            cfg,
            store: Mutex::new(PlanStore::default()),
            jobs: Mutex::new(HashMap::new()),
        })
    }

    fn job_lock(&self, plan: &str) -> Arc<tokio::sync::Mutex<()>> {
        self.jobs
            .lock()
            .unwrap()
            .entry(plan.to_string())
            .or_default()
            .clone()
    }
}

#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    status: StatusCode,
    pub code: String,
    pub message: String,
    pub path: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
}

impl ApiError {
    fn new(
        status: StatusCode,
        code: &str,
        message: impl Into<String>,
        path: impl Into<String>,
    ) -> Self {
        Self {
            status,
            code: code.into(),
            message: message.into(),
            path: path.into(),
            violations: Vec::new(),
        }
    }

    fn not_found(what: &str, id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "NotFound",
            format!("unknown {what} {id}"),
            id,
        )
    }
}

impl From<PlanError> for ApiError {
    fn from(e: PlanError) -> Self {
        let mut err = Self::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            e.code(),
            e.to_string(),
            e.path(),
        );
        if let PlanError::InvalidScenario(v) = e {
            err.violations = v;
        }
        err
    }
}

impl From<ScenarioError> for ApiError {
    fn from(e: ScenarioError) -> Self {
        match &e {
            ScenarioError::Parse { .. } => {
                Self::new(StatusCode::BAD_REQUEST, "ParseError", e.to_string(), "")
            }
            ScenarioError::Schema { path, .. } => Self::new(
                StatusCode::BAD_REQUEST,
                "SchemaError",
                e.to_string(),
                path.clone(),
            ),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, axum::Json(&self)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &str) -> ApiResult<T> {
    let mut de = serde_json::Deserializer::from_str(body);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let code = if inner.is_data() {
            "SchemaError"
        } else {
            "ParseError"
        };
        ApiError::new(StatusCode::BAD_REQUEST, code, inner.to_string(), path)
    })?;
    de.end()
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "ParseError", e.to_string(), ""))?;
    Ok(value)
}

fn json_text(text: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], text).into_response()
}

#[derive(Serialize)]
struct ScenarioCreated {
    scenario_id: String,
    warnings: Vec<Violation>,
}

async fn post_scenario(State(st): State<Arc<AppState>>, body: String) -> ApiResult<Response> {
    let s = load_scenario(&body)?;
    let violations = validate_scenario(&s);
    if !violations.is_empty() {
        let mut e = ApiError::new(
            StatusCode::BAD_REQUEST,
            "InvalidScenario",
            format!("scenario has {} violation(s)", violations.len()),
            violations[0].path.clone(),
        );
        e.violations = violations;
        return Err(e);
    }
    let warnings = scenario_warnings(&s);
    let scenario_id = st.store.lock().unwrap().add_scenario(s);
    Ok((
        StatusCode::CREATED,
        axum::Json(ScenarioCreated {
            scenario_id,
            warnings,
        }),
    )
        .into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanRequest {
    scenario_id: String,
}

#[derive(Serialize)]
struct PlanCreated {
    plan_id: String,
    version: u32,
    node_count: usize,
}

async fn post_plan(State(st): State<Arc<AppState>>, body: String) -> ApiResult<Response> {
    let req: PlanRequest = parse_body(&body)?;
    let scenario = st
        .store
        .lock()
        .unwrap()
        .scenario(&req.scenario_id)
        .ok_or_else(|| ApiError::not_found("scenario", &req.scenario_id))?;
    let job = st.clone();
    let s = scenario.clone();
    let plan = tokio::task::spawn_blocking(move || expand_coa(&s, &job.kb, &job.cfg))
        .await
        .expect("planner task")?;
    let node_count = plan.nodes.len();
    let (plan_id, version) = st.store.lock().unwrap().create(scenario, plan);
    Ok((
        StatusCode::CREATED,
        axum::Json(PlanCreated {
            plan_id,
            version,
            node_count,
        }),
    )
        .into_response())
}

fn stored(st: &AppState, id: &str, v: u32) -> ApiResult<coaplan_core::store::StoredVersion> {
    st.store
        .lock()
        .unwrap()
        .get(id, v)
        .cloned()
        .ok_or_else(|| ApiError::not_found("plan version", &format!("{id}/{v}")))
}

fn stored_plan(st: &AppState, id: &str, v: u32) -> ApiResult<Plan> {
    let s = stored(st, id, v)?;
    Ok(Plan::from_json(&s.json).expect("stored plans parse"))
}

async fn get_versions(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    let versions = st
        .store
        .lock()
        .unwrap()
        .versions(&id)
        .ok_or_else(|| ApiError::not_found("plan", &id))?;
    let list: Vec<_> = versions
        .into_iter()
        .map(|(version, parent)| json!({"version": version, "parent": parent}))
        .collect();
    Ok(axum::Json(json!({"plan_id": id, "versions": list})).into_response())
}

async fn get_plan(
    State(st): State<Arc<AppState>>,
    Path((id, v)): Path<(String, u32)>,
) -> ApiResult<Response> {
    Ok(json_text(stored(&st, &id, v)?.json.to_string()))
}

#[derive(Deserialize)]
struct MatrixQuery {
    period: Option<u32>,
    format: Option<String>,
}

async fn get_matrix(
    State(st): State<Arc<AppState>>,
    Path((id, v)): Path<(String, u32)>,
    Query(q): Query<MatrixQuery>,
) -> ApiResult<Response> {
    let period = q.period.unwrap_or(st.cfg.sync_period_min);
    if period == 0 {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "SchemaError",
            "period must be positive",
            "period",
        ));
    }
    let format = match q.format.as_deref() {
        None => MatrixFormat::Json,
        Some(f) => MatrixFormat::parse(f).ok_or_else(|| {
            ApiError::new(
                StatusCode::BAD_REQUEST,
                "SchemaError",
                format!("unknown format {f}"),
                "format",
            )
        })?,
    };
    let plan = stored_plan(&st, &id, v)?;
    let text = export_matrix(&build_sync_matrix(&plan, period), format);
    Ok(match format {
        MatrixFormat::Json => json_text(text),
        MatrixFormat::Csv => {
            ([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], text).into_response()
        }
    })
}

async fn get_timeline(
    State(st): State<Arc<AppState>>,
    Path((id, v)): Path<(String, u32)>,
) -> ApiResult<Response> {
    let plan = stored_plan(&st, &id, v)?;
    Ok(axum::Json(build_timeline(&plan)).into_response())
}

async fn post_edits(
    State(st): State<Arc<AppState>>,
    Path((id, v)): Path<(String, u32)>,
    body: String,
) -> ApiResult<Response> {
    let edits: EditSet = parse_body(&body)?;
    let lock = st.job_lock(&id);
    let _guard = lock.lock().await;
    let prior = stored(&st, &id, v)?;
    let prior_plan = Plan::from_json(&prior.json).expect("stored plans parse");
    let job = st.clone();
    let scenario = prior.scenario.clone();
    let (s, plan) = tokio::task::spawn_blocking(move || {
        replan_with_edits(&scenario, &job.kb, &job.cfg, &prior_plan, &edits)
    })
    .await
    .expect("planner task")?;
    let node_count = plan.nodes.len();
    let version = st
        .store
        .lock()
        .unwrap()
        .append(&id, v, Arc::new(s), plan)
        .expect("parent version exists");
    Ok((
        StatusCode::CREATED,
        axum::Json(PlanCreated {
            plan_id: id,
            version,
            node_count,
        }),
    )
        .into_response())
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/scenarios", post(post_scenario))
        .route("/api/plans", post(post_plan))
        .route("/api/plans/{id}", get(get_versions))
        .route("/api/plans/{id}/{v}", get(get_plan))
        .route("/api/plans/{id}/{v}/matrix", get(get_matrix))
        .route("/api/plans/{id}/{v}/edits", post(post_edits))
        .route("/api/plans/{id}/{v}/timeline", get(get_timeline))
        .with_state(state)
}
