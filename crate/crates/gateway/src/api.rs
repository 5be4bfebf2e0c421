//! HTTP JSON service over a shared [`Workspace`].
//!
//! Mutations run against a copy of the workspace under the write lock; the
//! copy replaces the live one (and is persisted) only if the operation and
//! the save both succeed. Reads take the read lock and never wait on each
//! other.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{FromRequest, Path, Query, Request, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use facetforge_core::navigation::View;
use facetforge_core::{UserId, Workspace};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::ApiError;
use crate::ops::{self, BrowseOut, FilterBody, ZoomBody};

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(json!({ "error": self }))).into_response()
    }
}

/// JSON body extractor whose rejections use the service's error shape.
pub struct Body<T>(pub T);

impl<S, T> FromRequest<S> for Body<T>
where
    T: DeserializeOwned,
    S: Send + Sync,
{
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        match Json::<T>::from_request(req, state).await {
            Ok(Json(v)) => Ok(Body(v)),
            Err(e) => Err(json_rejection(e)),
        }
    }
}

fn json_rejection(e: JsonRejection) -> ApiError {
    ApiError::new(400, "invalid_json", e.body_text())
}

fn query_rejection(e: QueryRejection) -> ApiError {
    ApiError::invalid(e.body_text())
}

/// One browsing step, replayed over the current portlets on every request so
/// a session never shows stale members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Step {
    Filter(String, String),
    Zoom(String),
}

pub struct AppState {
    workspace: RwLock<Workspace>,
    sessions: Mutex<BTreeMap<String, Vec<Step>>>,
    data: Option<PathBuf>,
}

pub type SharedState = Arc<AppState>;

impl AppState {
    pub fn new(workspace: Workspace, data: Option<PathBuf>) -> SharedState {
        Arc::new(AppState { workspace: RwLock::new(workspace), sessions: Mutex::new(BTreeMap::new()), data })
    }

    pub fn read<T>(&self, f: impl FnOnce(&Workspace) -> ops::Result<T>) -> ops::Result<T> {
        let ws = self.workspace.read().map_err(|_| ApiError::storage("workspace lock poisoned"))?;
        f(&ws)
    }

    pub fn mutate<T>(&self, f: impl FnOnce(&mut Workspace) -> ops::Result<T>) -> ops::Result<T> {
        let mut live = self.workspace.write().map_err(|_| ApiError::storage("workspace lock poisoned"))?;
        let mut next = live.clone();
        let out = f(&mut next)?;
        if next != *live {
            if let Some(path) = &self.data {
                next.save(path).map_err(|e| ApiError::storage(e.to_string()))?;
            }
            *live = next;
        }
        Ok(out)
    }

    pub fn snapshot(&self) -> ops::Result<Workspace> {
        self.read(|ws| Ok(ws.clone()))
    }
}

pub fn router(state: SharedState) -> Router {
    Router::new()
        .route("/health", get(|| async { Json(json!({ "status": "ok" })) }))
        .route("/users", post(add_user))
        .route("/portlets", post(add_portlet).get(list_portlets))
        .route("/tags", post(add_tag))
        .route("/ontology/load", post(load_ontology))
        .route("/match/learn", post(learn))
        .route("/match/superconcepts", post(superconcepts))
        .route("/views/{user}", get(browse))
        .route("/views/{user}/{portlet}", get(view))
        .route("/views/{user}/filter", post(filter))
        .route("/views/{user}/zoom", post(zoom))
        .route("/views/{user}/unzoom", post(unzoom))
        .route("/views/{user}/reset", post(reset))
        .route("/navigate", get(navigate))
        .route("/eval", post(eval))
        .fallback(|| async { ApiError::not_found("no such endpoint") })
        .with_state(state)
}

type Reply<T> = Result<Json<T>, ApiError>;

async fn add_user(State(s): State<SharedState>, Body(b): Body<ops::UserBody>) -> Reply<ops::UserCreated> {
    s.mutate(|ws| ops::add_user(ws, b)).map(Json)
}

async fn add_portlet(State(s): State<SharedState>, Body(b): Body<ops::PortletBody>) -> Reply<ops::PortletSummary> {
    s.mutate(|ws| ops::add_portlet(ws, b)).map(Json)
}

async fn list_portlets(State(s): State<SharedState>) -> Reply<Vec<ops::PortletSummary>> {
    s.read(|ws| Ok(ws.portlets()?.iter().map(ops::PortletSummary::from).collect())).map(Json)
}

async fn add_tag(State(s): State<SharedState>, Body(b): Body<ops::TagBody>) -> Reply<ops::TagCreated> {
    s.mutate(|ws| ops::add_tag(ws, b)).map(Json)
}

async fn load_ontology(State(s): State<SharedState>, Body(b): Body<ops::OntologyBody>) -> Reply<ops::OntologyLoaded> {
    s.mutate(|ws| ops::load_ontology(ws, b)).map(Json)
}

async fn learn(State(s): State<SharedState>, Body(b): Body<ops::LearnBody>) -> Reply<ops::Learned> {
    s.mutate(|ws| ops::learn(ws, b)).map(Json)
}

async fn superconcepts(
    State(s): State<SharedState>,
    body: Bytes,
) -> Reply<Vec<ops::SuperconceptOut>> {
    // The body is optional here; an empty one means the stored threshold.
    let b: ops::SuperconceptBody = if body.iter().all(u8::is_ascii_whitespace) {
        Default::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::new(400, "invalid_json", e.to_string()))?
    };
    s.read(|ws| ops::superconcepts(ws, b)).map(Json)
}

#[derive(Debug, Deserialize)]
struct SpeakerQuery {
    speaker: Option<String>,
}

async fn view(
    State(s): State<SharedState>,
    Path((user, portlet)): Path<(String, String)>,
    q: Result<Query<SpeakerQuery>, QueryRejection>,
) -> Reply<ops::ViewOut> {
    let Query(q) = q.map_err(query_rejection)?;
    s.read(|ws| ops::view(ws, &user, &portlet, q.speaker.as_deref())).map(Json)
}

fn replay(ws: &Workspace, steps: &[Step]) -> ops::Result<View> {
    let mut v = ws.browse()?;
    for step in steps {
        v = match step {
            Step::Filter(f, val) => v.filter(f, val),
            Step::Zoom(f) => v.zoom(f)?,
        };
    }
    Ok(v)
}

/// Applies `change` to the user's step list and answers with the resulting view.
fn session(s: &AppState, user: &str, change: impl FnOnce(&View, &mut Vec<Step>) -> ops::Result<()>) -> Reply<BrowseOut> {
    s.read(|ws| {
        ws.user(&UserId::new(user))?;
        let mut sessions = s.sessions.lock().map_err(|_| ApiError::storage("session lock poisoned"))?;
        let steps = sessions.entry(user.to_owned()).or_default();
        let current = replay(ws, steps)?;
        let mut next = steps.clone();
        change(&current, &mut next)?;
        let view = replay(ws, &next)?;
        *steps = next;
        Ok(Json(ops::browse_out(user, &view)))
    })
}

async fn browse(State(s): State<SharedState>, Path(user): Path<String>) -> Reply<BrowseOut> {
    session(&s, &user, |_, _| Ok(()))
}

async fn filter(State(s): State<SharedState>, Path(user): Path<String>, Body(b): Body<FilterBody>) -> Reply<BrowseOut> {
    session(&s, &user, |_, steps| {
        steps.push(Step::Filter(b.facet, b.value));
        Ok(())
    })
}

async fn zoom(State(s): State<SharedState>, Path(user): Path<String>, Body(b): Body<ZoomBody>) -> Reply<BrowseOut> {
    session(&s, &user, |current, steps| {
        current.zoom(&b.facet)?;
        steps.push(Step::Zoom(b.facet));
        Ok(())
    })
}

async fn unzoom(State(s): State<SharedState>, Path(user): Path<String>) -> Reply<BrowseOut> {
    session(&s, &user, |current, steps| {
        current.unzoom()?;
        let last = steps.iter().rposition(|st| matches!(st, Step::Zoom(_))).expect("zoom stack is non-empty");
        steps.remove(last);
        Ok(())
    })
}

async fn reset(State(s): State<SharedState>, Path(user): Path<String>) -> Reply<BrowseOut> {
    session(&s, &user, |_, steps| {
        steps.clear();
        Ok(())
    })
}

async fn navigate(State(s): State<SharedState>, q: Result<Query<ops::NavigateQuery>, QueryRejection>) -> Reply<ops::NavigateOut> {
    let Query(q) = q.map_err(query_rejection)?;
    s.read(|ws| ops::navigate(ws, &q)).map(Json)
}

async fn eval(Body(b): Body<ops::EvalBody>) -> Reply<ops::EvalOut> {
    ops::eval(b).map(Json)
}
