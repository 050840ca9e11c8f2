//! HTTP API over a sealed graph: ad-hoc queries, the example registry,
//! cardinalities and liveness.
//!
//! | endpoint | |
//! |---|---|
//! | `POST /query` | run a statement, see [`QueryRequest`] |
//! | `GET /examples`, `GET /examples/{slug}` | bundled example queries |
//! | `GET /stats` | per-label node and edge counts |
//! | `GET /health` | liveness; 503 until a graph is installed |

mod examples;
mod params;

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use litgraph_core::{GraphCounts, NodeLabel, PropertyGraph};
use litgraph_cypher::{execute, ExecOptions, QueryError, ResultTable};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value as JsonValue};
use tower_http::cors::{Any, CorsLayer};

pub use examples::{bundled_examples, load_examples, parse_examples, ExampleEntry, ExamplesError};
pub use params::{substitute, ParamError, Substituted};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ServiceConfig {
    /// Upper bound on rows per response; requests may only lower it.
    pub max_rows: usize,
    /// Upper bound on query run time; requests may only lower it.
    pub timeout: Duration,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig { max_rows: 10_000, timeout: Duration::from_millis(30_000) }
    }
}

/// Where the served graph came from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BuildInfo {
    pub source: Option<String>,
    /// When the import that produced the graph finished.
    pub built_at_unix: Option<u64>,
}

struct Loaded {
    graph: Arc<PropertyGraph>,
    counts: GraphCounts,
    build: BuildInfo,
}

/// Shared by all handlers. Starts empty; [`AppState::install`] makes the
/// graph available exactly once.
pub struct AppState {
    config: ServiceConfig,
    examples: Vec<ExampleEntry>,
    started: Instant,
    loaded: OnceLock<Loaded>,
}

impl AppState {
    pub fn new(config: ServiceConfig, examples: Vec<ExampleEntry>) -> Arc<Self> {
        Arc::new(AppState { config, examples, started: Instant::now(), loaded: OnceLock::new() })
    }

    /// State with the graph already installed.
    pub fn with_graph(
        config: ServiceConfig,
        examples: Vec<ExampleEntry>,
        graph: PropertyGraph,
        build: BuildInfo,
    ) -> Arc<Self> {
        let state = Self::new(config, examples);
        state.install(graph, build);
        state
    }

    /// Installs the graph, sealing it if needed. Later calls are ignored and
    /// return false.
    pub fn install(&self, graph: PropertyGraph, build: BuildInfo) -> bool {
        let graph = if graph.is_sealed() { graph } else { graph.sealed() };
        let counts = graph.counts();
        self.loaded.set(Loaded { graph: Arc::new(graph), counts, build }).is_ok()
    }

    pub fn is_loaded(&self) -> bool {
        self.loaded.get().is_some()
    }

    pub fn config(&self) -> ServiceConfig {
        self.config
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(Any)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]);
    Router::new()
        .route("/query", post(handle_query))
        .route("/examples", get(list_examples))
        .route("/examples/{slug}", get(get_example))
        .route("/stats", get(get_stats))
        .route("/health", get(health))
        .layer(cors)
        .with_state(state)
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: Arc<AppState>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QueryRequest {
    pub statement: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, JsonValue>,
    #[serde(default)]
    pub max_rows: Option<usize>,
    #[serde(default)]
    pub timeout_ms: Option<u64>,
}

#[derive(Debug, Serialize)]
struct Envelope {
    columns: Vec<String>,
    rows: Vec<JsonValue>,
    stats: Stats,
}

#[derive(Debug, Serialize)]
struct Stats {
    row_count: usize,
    elapsed_ms: u64,
    truncated: bool,
}

fn error(status: StatusCode, message: impl ToString) -> Response {
    (status, Json(json!({ "error": message.to_string() }))).into_response()
}

fn loading() -> Response {
    error(StatusCode::SERVICE_UNAVAILABLE, "graph is still loading")
}

fn envelope(table: &ResultTable, graph: &PropertyGraph, elapsed: Duration, truncated: bool) -> Envelope {
    Envelope {
        columns: table.columns.clone(),
        rows: table.rows_json(graph),
        stats: Stats { row_count: table.rows.len(), elapsed_ms: elapsed.as_millis() as u64, truncated },
    }
}

async fn handle_query(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let Some(loaded) = state.loaded.get() else { return loading() };
    let request: QueryRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("invalid request body: {e}")),
    };
    if request.statement.trim().is_empty() {
        return (StatusCode::BAD_REQUEST, Json(json!({ "error": "statement is empty", "offset": 0 }))).into_response();
    }
    let substituted = match substitute(&request.statement, &request.parameters) {
        Ok(s) => s,
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, e),
    };
    let config = state.config;
    let opts = ExecOptions {
        max_rows: request.max_rows.map_or(config.max_rows, |n| n.min(config.max_rows)),
        timeout: Some(request.timeout_ms.map_or(config.timeout, |ms| Duration::from_millis(ms).min(config.timeout))),
        use_indexes: true,
    };
    let graph = Arc::clone(&loaded.graph);
    let text = substituted.text.clone();
    let started = Instant::now();
    let outcome = tokio::task::spawn_blocking(move || execute(&text, &graph, opts)).await;
    let elapsed = started.elapsed();
    let graph = &loaded.graph;
    match outcome {
        Ok(Ok(table)) => (StatusCode::OK, Json(envelope(&table, graph, elapsed, false))).into_response(),
        Ok(Err(QueryError::RowLimitExceeded(partial))) => {
            (StatusCode::PAYLOAD_TOO_LARGE, Json(envelope(&partial, graph, elapsed, true))).into_response()
        }
        Ok(Err(QueryError::Timeout)) => error(StatusCode::REQUEST_TIMEOUT, QueryError::Timeout),
        Ok(Err(QueryError::Parse(e))) => {
            let offset = substituted.original_offset(e.offset);
            let body = json!({ "error": e.message, "offset": offset, "expected": e.expected });
            (StatusCode::BAD_REQUEST, Json(body)).into_response()
        }
        Ok(Err(e)) => error(StatusCode::BAD_REQUEST, e),
        Err(join) => {
            tracing::error!("query task failed: {join}");
            error(StatusCode::INTERNAL_SERVER_ERROR, "query execution failed")
        }
    }
}

async fn list_examples(State(state): State<Arc<AppState>>) -> Json<Vec<ExampleEntry>> {
    Json(state.examples.clone())
}

async fn get_example(State(state): State<Arc<AppState>>, Path(slug): Path<String>) -> Response {
    match state.examples.iter().find(|e| e.slug == slug) {
        Some(e) => Json(e.clone()).into_response(),
        None => error(StatusCode::NOT_FOUND, format!("no example `{slug}`")),
    }
}

async fn get_stats(State(state): State<Arc<AppState>>) -> Response {
    let Some(loaded) = state.loaded.get() else { return loading() };
    let indexes: Vec<String> = loaded
        .graph
        .indexed_properties()
        .into_iter()
        .map(|(label, prop): (NodeLabel, String)| format!("{label}.{prop}"))
        .collect();
    Json(json!({
        "nodes": loaded.counts.nodes,
        "edges": loaded.counts.edges,
        "total_nodes": loaded.counts.total_nodes(),
        "total_edges": loaded.counts.total_edges(),
        "indexes": indexes,
        "build": loaded.build,
    }))
    .into_response()
}

async fn health(State(state): State<Arc<AppState>>) -> Response {
    let uptime_ms = state.started.elapsed().as_millis() as u64;
    match state.loaded.get() {
        Some(l) => Json(json!({
            "status": "ok",
            "uptime_ms": uptime_ms,
            "node_count": l.graph.node_count(),
            "edge_count": l.graph.edge_count(),
        }))
        .into_response(),
        None => (StatusCode::SERVICE_UNAVAILABLE, Json(json!({ "status": "loading", "uptime_ms": uptime_ms })))
            .into_response(),
    }
}
