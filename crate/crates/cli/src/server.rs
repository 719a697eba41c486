//! JSON animation service. Sessions are independent; each one sits behind
//! its own lock so steps on a session are serialised.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use astd_core::engine::{Refusal, System};
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::session::{Session, StepError};

pub struct App {
    specs: BTreeMap<String, Arc<System>>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
}

impl App {
    /// Specifications are addressed by their `SPEC` name.
    pub fn new(systems: Vec<System>) -> App {
        App {
            specs: systems
                .into_iter()
                .map(|s| (s.doc.name.clone(), Arc::new(s)))
                .collect(),
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        }
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions
            .lock()
            .expect("session table")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown session `{id}`")))
    }
}

pub fn router(app: Arc<App>) -> Router {
    Router::new()
        .route("/specs", get(list_specs))
        .route("/sessions", post(create))
        .route("/sessions/{id}/state", get(state))
        .route("/sessions/{id}/step", post(step))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/reset", post(reset))
        .with_state(app)
}

pub async fn serve(app: Arc<App>, addr: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(app)).await
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, msg: impl Into<String>) -> ApiError {
        ApiError {
            status,
            body: json!({ "error": msg.into() }),
        }
    }

    fn from_step(e: StepError, s: &Session) -> ApiError {
        let mut err = match &e {
            StepError::Refused { reason, .. } => {
                let mut a = ApiError::new(StatusCode::CONFLICT, e.to_string());
                a.body["reason"] = json!(reason.reason());
                a.body["refusal"] = json!(match reason {
                    Refusal::Control => "control",
                    Refusal::DataGuard => "data_guard",
                    Refusal::Infeasible => "infeasible",
                });
                a
            }
            StepError::BadChoice { .. } => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
            StepError::BadEvent(..) => ApiError::new(StatusCode::BAD_REQUEST, e.to_string()),
            StepError::Engine(_) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        };
        err.body["trace"] = json!(s.trace());
        err
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

fn snapshot(id: &str, s: &Session) -> Result<Json<Value>, ApiError> {
    let snap = s
        .snapshot()
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    let mut j = serde_json::to_value(snap).expect("snapshots serialise");
    j["id"] = json!(id);
    Ok(Json(j))
}

async fn list_specs(State(app): State<Arc<App>>) -> Json<Value> {
    Json(json!({ "specs": app.specs.keys().collect::<Vec<_>>() }))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct CreateRequest {
    spec_name: Option<String>,
}

async fn create(
    State(app): State<Arc<App>>,
    Json(req): Json<CreateRequest>,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    let name = match req.spec_name {
        Some(n) => n,
        None if app.specs.len() == 1 => app.specs.keys().next().cloned().expect("one spec"),
        None => return Err(ApiError::new(StatusCode::BAD_REQUEST, "specName is required")),
    };
    let sys = app
        .specs
        .get(&name)
        .cloned()
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown spec `{name}`")))?;
    let session = Session::new(sys).map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    let id = format!("s{}", app.next_id.fetch_add(1, Ordering::Relaxed));
    let body = snapshot(&id, &session)?;
    app.sessions
        .lock()
        .expect("session table")
        .insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, body))
}

async fn state(State(app): State<Arc<App>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let s = app.session(&id)?;
    let s = s.lock().expect("session");
    snapshot(&id, &s)
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct StepRequest {
    event: String,
    #[serde(default)]
    choice_index: usize,
}

async fn step(
    State(app): State<Arc<App>>,
    Path(id): Path<String>,
    Json(req): Json<StepRequest>,
) -> Result<Json<Value>, ApiError> {
    let s = app.session(&id)?;
    let mut s = s.lock().expect("session");
    if let Err(e) = s.step(&req.event, req.choice_index) {
        return Err(ApiError::from_step(e, &s));
    }
    snapshot(&id, &s)
}

/// Undo at the initial state leaves it unchanged.
async fn undo(State(app): State<Arc<App>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let s = app.session(&id)?;
    let mut s = s.lock().expect("session");
    s.undo();
    snapshot(&id, &s)
}

async fn reset(State(app): State<Arc<App>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let s = app.session(&id)?;
    let mut s = s.lock().expect("session");
    s.reset();
    snapshot(&id, &s)
}
