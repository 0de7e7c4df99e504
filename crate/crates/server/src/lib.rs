//! HTTP API: scenario browsing and editing for the annotation tool, and
//! the session protocol for external agents.

pub mod error;
pub mod store;

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use humannav::harness::{
    ActRequest, CreateSession, EpisodeSource, SessionManager, DEFAULT_IDLE_TIMEOUT,
};
use humannav::world::scenario::HumanDoc;
use humannav::world::{
    activity_catalog, classify_viewpoints, load_scenario, occupied_nodes, save_scenario,
    CatalogActivity, ClassifyConfig, Region, Scenario, Split, ViewpointClass,
    DEFAULT_OCCUPANCY_RADIUS,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub use error::ApiError;
pub use store::{canonical_hash, Put, ScenarioStore, EPISODES_FILE};

type ApiResult<T> = Result<T, ApiError>;

pub struct AppState {
    pub store: Arc<ScenarioStore>,
    pub sessions: SessionManager,
}

impl AppState {
    pub fn new(store: ScenarioStore) -> Self {
        Self::with_timeout(store, DEFAULT_IDLE_TIMEOUT)
    }

    pub fn with_timeout(store: ScenarioStore, idle: Duration) -> Self {
        let store = Arc::new(store);
        let source: Arc<dyn EpisodeSource> = store.clone();
        AppState {
            store,
            sessions: SessionManager::new(source, idle),
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/v1/scenarios", get(list_scenarios))
        .route("/v1/scenarios/{id}", get(get_scenario).put(put_scenario))
        .route("/v1/scenarios/{id}/occupancy", get(occupancy))
        .route("/v1/scenarios/{id}/humans", post(add_human))
        .route("/v1/scenarios/{id}/humans/{hid}", delete(remove_human))
        .route("/v1/activities", get(activities))
        .route("/v1/sessions", post(create_session))
        .route("/v1/sessions/{sid}", delete(close_session))
        .route("/v1/sessions/{sid}/observation", get(observe))
        .route("/v1/sessions/{sid}/action", post(act))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, state: Arc<AppState>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}

fn parse<T: DeserializeOwned>(body: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::from(humannav::Error::Parse(e)))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub id: String,
    pub name: String,
    pub split: Split,
    pub nodes: usize,
    pub edges: usize,
    pub humans: usize,
    pub hash: String,
}

async fn list_scenarios(State(app): State<Arc<AppState>>) -> ApiResult<Json<Vec<ScenarioSummary>>> {
    let mut out = Vec::new();
    for id in app.store.ids() {
        let s = app.store.get(&id)?;
        out.push(ScenarioSummary {
            id: s.id.clone(),
            name: s.meta.name.clone(),
            split: s.meta.split,
            nodes: s.graph.len(),
            edges: s.graph.edges().len(),
            humans: s.humans().len(),
            hash: canonical_hash(&s),
        });
    }
    Ok(Json(out))
}

/// The canonical document, with its hash as the entity tag.
fn document(s: &Scenario) -> Response {
    let bytes = save_scenario(s);
    let tag = format!("\"{}\"", canonical_hash(s));
    (
        [
            (header::CONTENT_TYPE, "application/json".to_string()),
            (header::ETAG, tag),
        ],
        bytes,
    )
        .into_response()
}

async fn get_scenario(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    let s = app.store.get(&id)?;
    Ok(document(&s))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Saved {
    pub id: String,
    pub hash: String,
}

/// Replaces the scenario. An `If-Match` header holding the hash the
/// client last saw turns a concurrent change into a 409.
async fn put_scenario(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Json<Saved>> {
    let s = load_scenario(&body)?;
    if s.id != id {
        return Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "id_mismatch",
            format!("document id `{}` does not match `{id}`", s.id),
        ));
    }
    let expected = headers
        .get(header::IF_MATCH)
        .and_then(|v| v.to_str().ok())
        .map(|v| v.trim().trim_matches('"').to_string());
    match app.store.put(s, expected.as_deref())? {
        Put::Stored(s) => Ok(Json(Saved {
            id,
            hash: canonical_hash(&s),
        })),
        Put::Conflict { current } => Err(ApiError::new(
            StatusCode::CONFLICT,
            "conflict",
            format!("scenario `{id}` changed since it was read (now {current})"),
        )),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OccupancyQuery {
    #[serde(default)]
    frame: u32,
    r: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct OccupancyView {
    pub scenario: String,
    pub frame: u32,
    pub r: f64,
    pub occupied: Vec<String>,
    /// Per-viewpoint impact over the whole cycle.
    pub classes: BTreeMap<String, ViewpointClass>,
    pub hash: String,
}

fn occupancy_view(s: &Scenario, frame: u32, r: f64) -> OccupancyView {
    let classes = classify_viewpoints(
        s,
        &ClassifyConfig {
            occupancy_radius: r,
            ..Default::default()
        },
    );
    OccupancyView {
        scenario: s.id.clone(),
        frame,
        r,
        occupied: occupied_nodes(s, frame, r).nodes.into_iter().collect(),
        classes,
        hash: canonical_hash(s),
    }
}

async fn occupancy(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<OccupancyQuery>,
) -> ApiResult<Json<OccupancyView>> {
    let r = q.r.unwrap_or(DEFAULT_OCCUPANCY_RADIUS);
    if !(r > 0.0 && r.is_finite()) {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "invalid_params",
            "r must be a positive number",
        ));
    }
    let s = app.store.get(&id)?;
    Ok(Json(occupancy_view(&s, q.frame, r)))
}

async fn add_human(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<OccupancyView>> {
    let doc: HumanDoc = parse(&body)?;
    let h = doc.into_instance()?;
    let s = app.store.update(&id, |s| s.add_human(h))?;
    Ok(Json(occupancy_view(&s, 0, DEFAULT_OCCUPANCY_RADIUS)))
}

async fn remove_human(
    State(app): State<Arc<AppState>>,
    Path((id, hid)): Path<(String, String)>,
) -> ApiResult<Json<OccupancyView>> {
    let s = app.store.update(&id, |s| {
        s.remove_human(&hid)
            .map(|_| ())
            .ok_or_else(|| humannav::Error::NotFound(format!("human `{hid}` in `{id}`")))
    })?;
    Ok(Json(occupancy_view(&s, 0, DEFAULT_OCCUPANCY_RADIUS)))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Catalog {
    pub regions: Vec<Region>,
    pub activities: Vec<CatalogActivity>,
}

async fn activities() -> Json<Catalog> {
    Json(Catalog {
        regions: Region::ALL.to_vec(),
        activities: activity_catalog(),
    })
}

async fn create_session(State(app): State<Arc<AppState>>, body: Bytes) -> ApiResult<Response> {
    let req: CreateSession = parse(&body)?;
    let created = app.sessions.create(&req)?;
    Ok((StatusCode::CREATED, Json(created)).into_response())
}

async fn observe(State(app): State<Arc<AppState>>, Path(sid): Path<String>) -> ApiResult<Response> {
    Ok(Json(app.sessions.observe(&sid)?).into_response())
}

async fn act(
    State(app): State<Arc<AppState>>,
    Path(sid): Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    let req: ActRequest = parse(&body)?;
    Ok(Json(app.sessions.act(&sid, &req)?).into_response())
}

async fn close_session(
    State(app): State<Arc<AppState>>,
    Path(sid): Path<String>,
) -> ApiResult<Response> {
    Ok(Json(app.sessions.close(&sid)?).into_response())
}
