//! HTTP/JSON API for interactive cluster mutation.
//!
//! Sessions hold a root seed and a history of applied directions. Requests
//! to one session are serialized by a per-session lock; different sessions
//! run concurrently. Mutation work runs on the blocking pool.
//!
//! Routes (vertex indices are 1-based):
//!
//! | method | path | body / query |
//! |---|---|---|
//! | POST | `/sessions` | `{"quiver": {...}}` or `{"matrix": {"b": ...}}` |
//! | GET | `/sessions/{id}` | |
//! | POST | `/sessions/{id}/mutate` | `{"vertex": k}` |
//! | POST | `/sessions/{id}/undo` | |
//! | GET | `/sessions/{id}/neighborhood` | `?depth=d` |
//! | GET | `/sessions/{id}/verify` | |
//! | GET | `/sessions/{id}/export` | `?format=json\|dot` |

mod error;
mod persist;
mod session;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use cluster_core::explorer::neighborhood;
use cluster_core::format::{matrix_from_json_value, matrix_to_json, quiver_from_json_value, quiver_to_json};
use cluster_core::{ErrorName, Quiver, Seed};
use log::{info, warn};
use serde_json::{json, Value};
use tokio::sync::{Mutex, RwLock};
use tower_http::services::ServeDir;

pub use error::ApiError;
pub use persist::Journal;
pub use session::Session;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Largest neighborhood depth a client may request.
    pub max_depth: usize,
    /// JSON-lines journal; sessions are replayed from it at startup.
    pub journal: Option<PathBuf>,
    /// Directory served for paths outside the API.
    pub static_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig { max_depth: 3, journal: None, static_dir: None }
    }
}

type SessionRef = Arc<Mutex<Session>>;

pub struct AppState {
    config: ServiceConfig,
    sessions: RwLock<HashMap<String, SessionRef>>,
    journal: Option<Journal>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> std::io::Result<Arc<AppState>> {
        let journal = config.journal.as_deref().map(Journal::open).transpose()?;
        let mut sessions = HashMap::new();
        if let Some(j) = &journal {
            for s in j.load()? {
                sessions.insert(s.id.clone(), Arc::new(Mutex::new(s)));
            }
            info!("restored {} sessions from journal", sessions.len());
        }
        Ok(Arc::new(AppState { config, sessions: RwLock::new(sessions), journal }))
    }

    async fn session(&self, id: &str) -> Result<SessionRef, ApiError> {
        self.sessions.read().await.get(id).cloned().ok_or_else(|| ApiError::not_found(id))
    }

    fn record(&self, result: std::io::Result<()>) {
        if let Err(e) = result {
            warn!("journal write failed: {e}");
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    let static_dir = state.config.static_dir.clone();
    let api = Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/mutate", post(mutate))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/neighborhood", get(get_neighborhood))
        .route("/sessions/{id}/verify", get(verify))
        .route("/sessions/{id}/export", get(export))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let state = AppState::new(config)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

fn parse_body(body: &Bytes) -> Result<Value, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request("InvalidJson", e.to_string()))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::internal(e.to_string()))
}

async fn create_session(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let v = parse_body(&body)?;
    let matrix = if let Some(q) = v.get("quiver") {
        quiver_from_json_value(q)?.to_matrix()
    } else if let Some(m) = v.get("matrix") {
        matrix_from_json_value(m)?
    } else {
        return Err(ApiError::bad_request("InvalidPayload", "expected \"quiver\" or \"matrix\""));
    };
    let id = uuid::Uuid::new_v4().to_string();
    if let Some(j) = &state.journal {
        state.record(j.created(&id, &matrix));
    }
    let session = Session::new(id.clone(), matrix);
    let summary = session.summary();
    state.sessions.write().await.insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(summary)).into_response())
}

async fn get_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let s = state.session(&id).await?;
    let s = s.lock().await;
    Ok(Json(s.summary()))
}

fn change_response(s: &Session, change: session::Change) -> Value {
    let mut out = s.summary();
    out["changed"] = json!(change.vertex + 1);
    out["old"] = json!(change.old);
    out["new"] = json!(change.new);
    out
}

async fn mutate(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let v = parse_body(&body)?;
    let s = state.session(&id).await?;
    let mut s = s.lock().await;
    let n = s.n();
    let vertex = match v.get("vertex").and_then(Value::as_u64) {
        Some(k) if (1..=n as u64).contains(&k) => k as usize - 1,
        _ => {
            return Err(ApiError::bad_request(
                "IndexOutOfRange",
                format!("\"vertex\" must be an integer in 1..={n}"),
            ))
        }
    };
    let current = s.current.clone();
    let next = blocking(move || current.mutate(vertex)).await??;
    let change = s.push(vertex, next);
    if let Some(j) = &state.journal {
        state.record(j.event(&id, persist::Event::Mutate(vertex)));
    }
    Ok(Json(change_response(&s, change)))
}

async fn undo(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let s = state.session(&id).await?;
    let mut s = s.lock().await;
    let Some(&last) = s.history.last() else {
        return Err(ApiError::new(StatusCode::CONFLICT, "EmptyHistory", "nothing to undo"));
    };
    let current = s.current.clone();
    let previous = blocking(move || current.mutate(last)).await??;
    let change = s.pop(previous).expect("history is not empty");
    if let Some(j) = &state.journal {
        state.record(j.event(&id, persist::Event::Undo));
    }
    Ok(Json(change_response(&s, change)))
}

fn query_usize(q: &HashMap<String, String>, name: &str, default: usize) -> Result<usize, ApiError> {
    match q.get(name) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| ApiError::bad_request("InvalidQuery", format!("{name} must be a nonnegative integer"))),
    }
}

async fn get_neighborhood(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> Result<Json<Value>, ApiError> {
    let depth = query_usize(&q, "depth", 1)?;
    if depth > state.config.max_depth {
        return Err(ApiError::bad_request(
            "DepthTooLarge",
            format!("depth {depth} exceeds the maximum {}", state.config.max_depth),
        ));
    }
    let s = state.session(&id).await?;
    let current: Seed = s.lock().await.current.clone();
    let result = blocking(move || neighborhood(&current, depth))
        .await?
        .map_err(|e| ApiError::new(StatusCode::CONFLICT, e.name(), e.to_string()))?;
    let nodes: Vec<Value> = result
        .graph
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, node)| {
            json!({
                "id": i,
                "cluster": node.seed.renderings(),
                "quiver": quiver_to_json(&Quiver::from_matrix(node.seed.matrix())),
                "matrix": matrix_to_json(node.seed.matrix()),
                "witness": node.witness.iter().map(|k| k + 1).collect::<Vec<_>>(),
            })
        })
        .collect();
    let edges: Vec<Value> = result
        .graph
        .edges()
        .into_iter()
        .map(|(from, d, to)| json!({ "from": from, "to": to, "direction": d + 1 }))
        .collect();
    Ok(Json(json!({
        "center": 0,
        "depth": depth,
        "nodes": nodes,
        "edges": edges,
        "complete": result.complete,
    })))
}

async fn verify(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let s = state.session(&id).await?;
    let s = s.lock().await.clone();
    let history = s.history.len();
    let consistent = blocking(move || s.verify()).await??;
    Ok(Json(json!({ "consistent": consistent, "history_length": history })))
}

async fn export(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> Result<Response, ApiError> {
    let s = state.session(&id).await?;
    let s = s.lock().await;
    match q.get("format").map(String::as_str).unwrap_or("json") {
        "json" => Ok(Json(s.export_json()).into_response()),
        "dot" => Ok(([(header::CONTENT_TYPE, "text/vnd.graphviz")], s.export_dot()).into_response()),
        other => Err(ApiError::bad_request("InvalidQuery", format!("unknown export format {other:?}"))),
    }
}
