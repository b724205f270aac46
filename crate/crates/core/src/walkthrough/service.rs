//! JSON-over-HTTP front end for walkthrough sessions.
//!
//! | method | path                              | result                          |
//! |--------|-----------------------------------|---------------------------------|
//! | POST   | `/api/models`                     | 201 `{modelId, validation}`     |
//! | GET    | `/api/models/{id}`                | chart summary                   |
//! | GET    | `/api/models/{id}/dot`            | Graphviz text, `?highlight=`    |
//! | GET    | `/api/models/{id}/feature`        | transition suite feature text   |
//! | POST   | `/api/models/{id}/sessions`       | 201 session view                |
//! | GET    | `/api/sessions/{id}`              | session view                    |
//! | POST   | `/api/sessions/{id}/fire`         | session view                    |
//! | POST   | `/api/sessions/{id}/undo`         | session view                    |
//! | GET    | `/api/sessions/{id}/trace`        | trace feature text              |
//!
//! Errors are `{"error": {"code", "message", "line"?}}`.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Code, Error, Result};
use crate::feature::{parse_feature, recover_statechart, render_feature};
use crate::formats::dot::render_dot;
use crate::formats::scdl::parse_scdl_unchecked;
use crate::formats::xmi::parse_xmi_unchecked;
use crate::guard::{Bindings, Placeholder};
use crate::model::{validate, StateId, StateKind, Statechart, TransitionId, ValidationReport};
use crate::scenario::generate_transition_suite;
use crate::walkthrough::store::SessionStore;
use crate::walkthrough::{Choice, Session, SessionId, Step};

pub const DEFAULT_ADDR: &str = "127.0.0.1:7373";

/// Id under which `serve` registers the model it was started with.
pub const DEFAULT_MODEL_ID: &str = "default";

#[derive(Debug, Default)]
pub struct AppState {
    models: RwLock<HashMap<String, Arc<Statechart>>>,
    pub sessions: SessionStore,
}

impl AppState {
    pub fn new(sessions: SessionStore) -> Self {
        AppState {
            models: RwLock::default(),
            sessions,
        }
    }

    /// Registers a validated chart under `id`.
    pub fn add_model(&self, id: impl Into<String>, chart: Statechart) -> Result<()> {
        chart.ensure_valid()?;
        self.models
            .write()
            .unwrap()
            .insert(id.into(), Arc::new(chart));
        Ok(())
    }

    fn model(&self, id: &str) -> Result<Arc<Statechart>> {
        self.models
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| Error::new(Code::UnknownModel, format!("unknown model {id}")))
    }
}

struct ApiError(Error, Option<ValidationReport>);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(e, None)
    }
}

fn status_for(code: Code) -> StatusCode {
    match code {
        Code::UnknownModel | Code::UnknownSession => StatusCode::NOT_FOUND,
        Code::NotEnabled | Code::EmptyTrace => StatusCode::CONFLICT,
        Code::UnboundPlaceholder | Code::ExtraBinding | Code::InvalidBinding => {
            StatusCode::UNPROCESSABLE_ENTITY
        }
        c if c.is_model_error() => StatusCode::UNPROCESSABLE_ENTITY,
        _ => StatusCode::BAD_REQUEST,
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let ApiError(err, report) = self;
        let mut error = json!({ "code": err.code, "message": err.message });
        if let Some(line) = err.line {
            error["line"] = json!(line);
        }
        let mut body = json!({ "error": error });
        if let Some(report) = report {
            body["validation"] = json!(report);
        }
        (status_for(err.code), Json(body)).into_response()
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T> {
    serde_json::from_slice(body)
        .map_err(|e| Error::new(Code::InvalidArgument, format!("invalid request body: {e}")))
}

fn millis(t: SystemTime) -> u64 {
    t.duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SessionView {
    session_id: SessionId,
    current: StateId,
    current_name: String,
    steps: Vec<Step>,
    choices: Vec<Choice>,
    created_at: u64,
    updated_at: u64,
}

impl From<&Session> for SessionView {
    fn from(s: &Session) -> Self {
        SessionView {
            session_id: s.id.clone(),
            current: s.current.clone(),
            current_name: s.chart.state_name(&s.current).to_string(),
            steps: s.steps.clone(),
            choices: s.choices(),
            created_at: millis(s.created_at),
            updated_at: millis(s.updated_at),
        }
    }
}

#[derive(Serialize)]
struct StateView<'a> {
    id: &'a StateId,
    name: &'a str,
    kind: StateKind,
}

#[derive(Serialize)]
struct TransitionView<'a> {
    id: &'a TransitionId,
    source: &'a StateId,
    target: &'a StateId,
    event: &'a str,
    guard: Option<String>,
    effects: &'a [String],
    placeholders: Vec<Placeholder>,
}

fn model_view(id: &str, chart: &Statechart) -> Value {
    let states: Vec<StateView> = chart
        .states
        .iter()
        .map(|s| StateView {
            id: &s.id,
            name: &s.name,
            kind: s.kind,
        })
        .collect();
    let transitions: Vec<TransitionView> = chart
        .transitions
        .iter()
        .map(|t| TransitionView {
            id: &t.id,
            source: &t.source,
            target: &t.target,
            event: &t.event,
            guard: t.rendered_guard(),
            effects: &t.effects,
            placeholders: t.placeholders(),
        })
        .collect();
    json!({
        "modelId": id,
        "name": chart.name,
        "subject": chart.subject,
        "initial": chart.initial().map(|s| &s.id),
        "states": states,
        "transitions": transitions,
    })
}

#[derive(Deserialize)]
struct NewModel {
    format: String,
    source: String,
}

async fn create_model(State(app): State<Arc<AppState>>, body: Bytes) -> ApiResult<Response> {
    let req: NewModel = parse_body(&body)?;
    let chart = match req.format.as_str() {
        "scdl" => parse_scdl_unchecked(&req.source)?,
        "xmi" => parse_xmi_unchecked(&req.source)?,
        "feature" => recover_statechart(&parse_feature(&req.source)?)?,
        other => {
            return Err(Error::new(
                Code::InvalidArgument,
                format!("unknown format {other:?}; expected scdl or xmi"),
            )
            .into())
        }
    };
    let report = validate(&chart);
    if let Some(first) = report.errors.first() {
        let err = Error::new(first.code, report.summary());
        return Err(ApiError(err, Some(report)));
    }
    let id = SessionId::random().0;
    app.add_model(id.clone(), chart)?;
    Ok((
        StatusCode::CREATED,
        Json(json!({ "modelId": id, "validation": report })),
    )
        .into_response())
}

async fn get_model(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<Value>> {
    let chart = app.model(&id)?;
    Ok(Json(model_view(&id, &chart)))
}

#[derive(Deserialize)]
struct DotQuery {
    highlight: Option<String>,
}

async fn get_dot(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<DotQuery>,
) -> ApiResult<Response> {
    let chart = app.model(&id)?;
    let highlight = q.highlight.filter(|h| !h.is_empty()).map(StateId);
    let dot = render_dot(&chart, highlight.as_ref())?;
    Ok((
        [(header::CONTENT_TYPE, "text/vnd.graphviz; charset=utf-8")],
        dot,
    )
        .into_response())
}

async fn get_feature(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    let chart = app.model(&id)?;
    let text = render_feature(&generate_transition_suite(&chart)?);
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response())
}

async fn create_session(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    let chart = app.model(&id)?;
    let session = Session::create(chart)?;
    let view = SessionView::from(&session);
    app.sessions.insert(session);
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

async fn get_session(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<SessionView>> {
    let session = app.sessions.get(&SessionId(id))?;
    Ok(Json(SessionView::from(&session)))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct FireRequest {
    transition_id: String,
    #[serde(default)]
    bindings: Bindings,
}

async fn fire(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<SessionView>> {
    let req: FireRequest = parse_body(&body)?;
    let transition = TransitionId(req.transition_id);
    let session = app
        .sessions
        .update(&SessionId(id), |s| s.fire(&transition, req.bindings))?;
    Ok(Json(SessionView::from(&session)))
}

async fn undo(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Json<SessionView>> {
    let session = app.sessions.update(&SessionId(id), |s| Ok(s.undo()))?;
    Ok(Json(SessionView::from(&session)))
}

async fn trace(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let text = app.sessions.get(&SessionId(id))?.render_trace()?;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response())
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/models", post(create_model))
        .route("/api/models/{id}", get(get_model))
        .route("/api/models/{id}/dot", get(get_dot))
        .route("/api/models/{id}/feature", get(get_feature))
        .route("/api/models/{id}/sessions", post(create_session))
        .route("/api/sessions/{id}", get(get_session))
        .route("/api/sessions/{id}/fire", post(fire))
        .route("/api/sessions/{id}/undo", post(undo))
        .route("/api/sessions/{id}/trace", get(trace))
        .with_state(state)
}

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub addr: SocketAddr,
    pub persist: Option<PathBuf>,
}

/// Runs the service until Ctrl-C, loading and saving sessions when a
/// persistence file is configured.
pub async fn serve(model: Statechart, config: ServeConfig) -> Result<()> {
    let sessions = match &config.persist {
        Some(path) => SessionStore::load(path)?,
        None => SessionStore::new(),
    };
    let state = Arc::new(AppState::new(sessions));
    state.add_model(DEFAULT_MODEL_ID, model)?;

    let listener = tokio::net::TcpListener::bind(config.addr)
        .await
        .map_err(|e| Error::new(Code::Io, format!("cannot listen on {}: {e}", config.addr)))?;
    tracing::info!(addr = %config.addr, model = DEFAULT_MODEL_ID, "walkthrough service listening");
    axum::serve(listener, router(Arc::clone(&state)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| Error::new(Code::Io, e.to_string()))?;

    if let Some(path) = &config.persist {
        state.sessions.save(path)?;
        tracing::info!(path = %path.display(), sessions = state.sessions.len(), "sessions saved");
    }
    Ok(())
}
