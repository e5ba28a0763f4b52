//! Read-only HTTP API over a pattern store and its data graph.
//!
//! Endpoints: `GET /patterns`, `GET /patterns/{key}`, `POST /match`,
//! `POST /rules` and `GET /graph/summary`. Every response is JSON and a
//! pure function of the store, the graph and the request.

pub mod model;

use std::path::Path;
use std::sync::Arc;

use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use tqmine_core::{
    format_fingerprint, frequency_table, mine_rules_for, node_name, parse_query, DataGraph,
    EquivalenceFilter, Error, ParsedQuery, PatternStore, RuleOptions,
};

pub use model::*;

/// Largest pattern `/match` evaluates directly on the graph.
pub const ADHOC_MAX_NODES: usize = 8;

/// Store and graph shared by all requests.
#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

struct Inner {
    store: PatternStore,
    graph: DataGraph,
}

impl AppState {
    pub fn new(store: PatternStore, graph: DataGraph) -> Self {
        AppState {
            inner: Arc::new(Inner { store, graph }),
        }
    }

    /// Loads the graph and the store built from it; a store built for a
    /// different graph is refused.
    pub fn load(store_dir: &Path, graph_file: &Path) -> tqmine_core::Result<Self> {
        let graph = DataGraph::load(graph_file)?;
        let store = PatternStore::load(store_dir, &graph)?;
        Ok(AppState::new(store, graph))
    }

    pub fn store(&self) -> &PatternStore {
        &self.inner.store
    }

    pub fn graph(&self) -> &DataGraph {
        &self.inner.graph
    }
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    hint: Option<String>,
}

/// An error response: status plus `{error, hint?}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
    pub hint: Option<String>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
            hint: None,
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::QueryParse { .. }
            | Error::InvalidPattern(_)
            | Error::InvalidArgument(_)
            | Error::InvalidTree(_) => ApiError::new(StatusCode::BAD_REQUEST, e.to_string()),
            Error::LhsNotMined { ref key } => ApiError {
                status: StatusCode::CONFLICT,
                hint: Some(format!(
                    "mine a store whose trees include the shape of {key}, then restart the service"
                )),
                message: e.to_string(),
            },
            _ => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: self.message,
            hint: self.hint,
        };
        (self.status, Json(body)).into_response()
    }
}

pub fn list_patterns(state: &AppState) -> Vec<PatternSummary> {
    state
        .store()
        .entries()
        .map(|(_, e)| PatternSummary {
            pattern: ApiPattern::from_pattern(&e.pattern),
            rows: e.table.len(),
        })
        .collect()
}

pub fn pattern_detail(state: &AppState, key: &str) -> Result<PatternDetail, ApiError> {
    let e = state.store().get(key).ok_or_else(|| {
        ApiError::new(StatusCode::NOT_FOUND, format!("no pattern with key {key}"))
    })?;
    Ok(PatternDetail {
        pattern: ApiPattern::from_pattern(&e.pattern),
        columns: e.table.sigma.iter().map(|&s| node_name(s)).collect(),
        rows: table_rows(&e.table, state.graph()),
    })
}

/// Frequent assignments of the open parameters of a pattern whose other
/// parameters are fixed to constants.
pub fn match_pattern(state: &AppState, query: &str) -> Result<MatchResponse, ApiError> {
    let parsed = parse_query(query)?;
    let g = state.graph();
    let body = parsed.body();
    let key = body.reduce().0.refined_level_sequence();
    let mut pattern = ApiPattern::from_pattern(body);
    for (v, node) in pattern.nodes.iter_mut().enumerate() {
        node.name = parsed.names[v].clone();
        node.constant = parsed.fixed.get(&v).cloned();
    }
    let sigma = body.sigma();
    let open: Vec<usize> = sigma
        .iter()
        .copied()
        .filter(|v| !parsed.fixed.contains_key(v))
        .collect();
    let columns = open.iter().map(|&v| parsed.names[v].clone()).collect();

    let mut fixed = Vec::new();
    for (&v, c) in &parsed.fixed {
        match g.node_id(c) {
            Some(id) => fixed.push((sigma.iter().position(|&s| s == v).unwrap(), id)),
            None => {
                return Ok(MatchResponse {
                    key,
                    adhoc: false,
                    pattern,
                    columns,
                    rows: Vec::new(),
                })
            }
        }
    }
    let (table, adhoc) = match state.store().lookup_equivalent(body) {
        Some(t) => (t, false),
        None => {
            if body.len() > ADHOC_MAX_NODES {
                return Err(ApiError::new(
                    StatusCode::BAD_REQUEST,
                    format!(
                        "pattern has {} nodes and is not in the store; direct evaluation is limited to {ADHOC_MAX_NODES} nodes",
                        body.len()
                    ),
                ));
            }
            (frequency_table(g, body, None, state.store().minsup), true)
        }
    };
    let keep: Vec<usize> = open
        .iter()
        .map(|v| sigma.iter().position(|s| s == v).unwrap())
        .collect();
    let mut rows: Vec<ApiRow> = table
        .entries
        .iter()
        .filter(|(alpha, _)| fixed.iter().all(|&(i, id)| alpha[i] == id))
        .map(|(alpha, &freq)| ApiRow {
            values: keep.iter().map(|&i| g.name(alpha[i]).to_string()).collect(),
            freq,
        })
        .collect();
    rows.sort_by(|a, b| a.values.cmp(&b.values));
    Ok(MatchResponse {
        key,
        adhoc,
        pattern,
        columns,
        rows,
    })
}

/// Rule options from request fields, shared with the command line.
pub fn rule_options(
    minconf: &Minconf,
    equivalence: Option<&str>,
    rhs_max_nodes: Option<usize>,
) -> tqmine_core::Result<RuleOptions> {
    let mut opts = RuleOptions::new(minconf.to_ratio()?);
    if let Some(e) = equivalence {
        opts.filter = e.parse::<EquivalenceFilter>()?;
    }
    opts.max_rhs_nodes = rhs_max_nodes;
    Ok(opts)
}

pub fn rules(state: &AppState, req: &RulesRequest) -> Result<Vec<ApiRule>, ApiError> {
    let lhs: ParsedQuery = parse_query(&req.lhs)?;
    let opts = rule_options(&req.minconf, req.equivalence.as_deref(), req.rhs_max_nodes)?;
    let found = mine_rules_for(state.store(), state.graph(), &lhs, &opts)?;
    Ok(rules_json(&found, state.graph()))
}

pub fn graph_summary(state: &AppState) -> GraphSummary {
    let g = state.graph();
    GraphSummary {
        nodes: g.node_count(),
        edges: g.edge_count(),
        fingerprint: format_fingerprint(g.fingerprint()),
        minsup: state.store().minsup,
        max_nodes: state.store().max_nodes,
        patterns: state.store().len(),
    }
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

async fn get_patterns(State(s): State<AppState>) -> Json<Vec<PatternSummary>> {
    Json(list_patterns(&s))
}

async fn get_pattern(
    State(s): State<AppState>,
    UrlPath(key): UrlPath<String>,
) -> Result<Json<PatternDetail>, ApiError> {
    pattern_detail(&s, &key).map(Json)
}

async fn post_match(
    State(s): State<AppState>,
    Json(req): Json<MatchRequest>,
) -> Result<Json<MatchResponse>, ApiError> {
    blocking(move || match_pattern(&s, &req.query))
        .await
        .map(Json)
}

async fn post_rules(
    State(s): State<AppState>,
    Json(req): Json<RulesRequest>,
) -> Result<Json<Vec<ApiRule>>, ApiError> {
    blocking(move || rules(&s, &req)).await.map(Json)
}

async fn get_summary(State(s): State<AppState>) -> Json<GraphSummary> {
    Json(graph_summary(&s))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/patterns", get(get_patterns))
        .route("/patterns/{key}", get(get_pattern))
        .route("/match", post(post_match))
        .route("/rules", post(post_rules))
        .route("/graph/summary", get(get_summary))
        .with_state(state)
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: AppState,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
}
