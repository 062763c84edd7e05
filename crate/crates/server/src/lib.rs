//! HTTP facade over the engine, versioned under `/v1`.
//!
//! | Method | Path | Body | Result |
//! |---|---|---|---|
//! | PUT | `/v1/projects/{id}` | project document | envelope, 201 on create |
//! | GET | `/v1/projects/{id}` | | envelope |
//! | PATCH | `/v1/projects/{id}/judgments` | [`JudgmentPatch`] | envelope |
//! | PATCH | `/v1/projects/{id}/cells` | [`CellPatch`] | envelope |
//! | POST | `/v1/projects/{id}/compute/ahp` | optional [`ComputeRequest`] | AHP analysis |
//! | POST | `/v1/projects/{id}/compute/rank` | optional [`ComputeRequest`] | priority report |
//! | POST | `/v1/projects/{id}/compute/sensitivity` | perturbation spec | stability report |
//!
//! The envelope is `{id, revision, project}`. Every response about a project
//! carries its revision as an `ETag`; writes may send `If-Match` with the
//! revision they were based on and get 409 on mismatch. Errors are
//! [`ApiError`] bodies.

mod error;
mod store;

use std::future::Future;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use fqfd_core::ahp::WeightMethod;
use fqfd_core::fuzzy::{CorrelationDegree, RelationshipDegree};
use fqfd_core::pipeline::{analyze_ahp, rank_project, RunOptions};
use fqfd_core::project::{HoqProject, Selection};
use fqfd_core::sensitivity::{run_sensitivity_with, PerturbationSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub use error::ApiError;
pub use store::{check_id, Snapshot, Store};

#[derive(Debug, Clone)]
pub struct AppState {
    pub store: Arc<Store>,
}

impl AppState {
    pub fn new(store: Store) -> Self {
        AppState { store: Arc::new(store) }
    }
}

/// Sets one pairwise judgment; the reciprocal cell is mirrored.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JudgmentPatch {
    pub respondent: String,
    /// `"criteria"` or a criterion code naming a local matrix.
    pub matrix: String,
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridName {
    Relationships,
    Roof,
}

/// Sets one linguistic cell; roof cells are mirrored.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellPatch {
    pub grid: GridName,
    pub row: usize,
    pub column: usize,
    pub token: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComputeRequest {
    /// Weights from one respondent instead of the group aggregate.
    pub respondent: Option<String>,
    pub method: Option<WeightMethod>,
    pub allow_inconsistent: Option<bool>,
}

impl ComputeRequest {
    fn options(self) -> RunOptions {
        RunOptions {
            selection: self.respondent.map_or(Selection::Group, Selection::Respondent),
            method: self.method,
            allow_inconsistent: self.allow_inconsistent,
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    id: &'a str,
    revision: u64,
    project: &'a HoqProject,
}

fn etag(revision: u64) -> HeaderValue {
    HeaderValue::from_str(&format!("\"{revision}\"")).expect("ascii etag")
}

fn envelope(id: &str, snap: &Snapshot, status: StatusCode) -> Response {
    let body = Envelope { id, revision: snap.revision, project: &snap.project };
    (status, [(header::ETAG, etag(snap.revision))], Json(body)).into_response()
}

fn with_revision<T: Serialize>(revision: u64, value: T) -> Response {
    ([(header::ETAG, etag(revision))], Json(value)).into_response()
}

fn expected_revision(headers: &HeaderMap) -> Result<Option<u64>, ApiError> {
    let Some(raw) = headers.get(header::IF_MATCH) else { return Ok(None) };
    let bad = || ApiError::new("InvalidRevision", "If-Match must carry a revision number").at("If-Match");
    let text = raw.to_str().map_err(|_| bad())?.trim();
    let text = text.strip_prefix("W/").unwrap_or(text).trim_matches('"');
    text.parse().map(Some).map_err(|_| bad())
}

fn parse_json<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::new("ParseError", format!("line {}, column {}: {e}", e.line(), e.column())))
}

fn parse_optional<T: DeserializeOwned + Default>(body: &[u8]) -> Result<T, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        Ok(T::default())
    } else {
        parse_json(body)
    }
}

async fn put_project(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    check_id(&id)?;
    let expected = expected_revision(&headers)?;
    let text = std::str::from_utf8(&body).map_err(|e| ApiError::new("ParseError", e.to_string()))?;
    let project = HoqProject::from_json(text)?;
    let snap = state.store.update(&id, expected, true, |_| Ok(project))?;
    let status = if snap.revision == 1 && expected != Some(1) { StatusCode::CREATED } else { StatusCode::OK };
    Ok(envelope(&id, &snap, status))
}

async fn get_project(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let snap = state.store.get(&id)?;
    Ok(envelope(&id, &snap, StatusCode::OK))
}

fn apply_judgment(current: &HoqProject, edit: &JudgmentPatch) -> Result<HoqProject, ApiError> {
    let mut p = current.clone();
    let resp = p.respondent_mut(&edit.respondent).ok_or_else(|| {
        ApiError::new("UnknownRespondent", format!("no respondent with id {:?}", edit.respondent)).at("respondent")
    })?;
    let rows = if edit.matrix == "criteria" {
        &mut resp.criteria_matrix
    } else {
        resp.local_matrices
            .get_mut(&edit.matrix)
            .ok_or_else(|| ApiError::new("UnknownMatrix", format!("no matrix named {:?}", edit.matrix)).at("matrix"))?
    };
    let n = rows.len();
    let (i, j, value) = (edit.i, edit.j, edit.value);
    if i >= n || j >= n || i == j {
        return Err(ApiError::new(
            "InvalidIndex",
            format!("judgment index ({i}, {j}) is invalid for a {n}x{n} matrix"),
        )
        .at(format!("{}[{i}][{j}]", edit.matrix)));
    }
    if !(value > 0.0 && value.is_finite()) {
        return Err(ApiError::new("NonPositiveJudgment", format!("judgment must be positive and finite, got {value}"))
            .at(format!("{}[{i}][{j}]", edit.matrix)));
    }
    rows[i][j] = value;
    rows[j][i] = 1.0 / value;
    p.ensure_valid()?;
    Ok(p)
}

fn apply_cell(current: &HoqProject, edit: &CellPatch) -> Result<HoqProject, ApiError> {
    let mut p = current.clone();
    let (r, c) = (edit.row, edit.column);
    let locus = format!(
        "{}[{r}][{c}]",
        match edit.grid {
            GridName::Relationships => "relationships",
            GridName::Roof => "roof",
        }
    );
    let token_error =
        |e: fqfd_core::fuzzy::UnknownToken| ApiError::new("UnknownLinguisticToken", e.to_string()).at(locus.clone());
    let out_of_range = |rows: usize, cols: usize| {
        ApiError::new("InvalidIndex", format!("cell ({r}, {c}) is outside the {rows}x{cols} grid")).at(locus.clone())
    };
    match edit.grid {
        GridName::Relationships => {
            let (n, m) = (p.crs.len(), p.trs.len());
            if r >= n || c >= m {
                return Err(out_of_range(n, m));
            }
            let d: RelationshipDegree = edit.token.parse().map_err(token_error)?;
            p.relationships[r][c] = d;
        }
        GridName::Roof => {
            let m = p.trs.len();
            if r >= m || c >= m {
                return Err(out_of_range(m, m));
            }
            let d: CorrelationDegree = edit.token.parse().map_err(token_error)?;
            if r == c {
                if d == CorrelationDegree::None {
                    return Ok(p);
                }
                return Err(ApiError::new("RoofDiagonal", "diagonal roof cells must be empty").at(locus.clone()));
            }
            p.roof[r][c] = d;
            p.roof[c][r] = d;
        }
    }
    p.ensure_valid()?;
    Ok(p)
}

async fn patch_judgment(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let expected = expected_revision(&headers)?;
    let edit: JudgmentPatch = parse_json(&body)?;
    let snap = state.store.update(&id, expected, false, |cur| apply_judgment(cur.expect("exists"), &edit))?;
    Ok(envelope(&id, &snap, StatusCode::OK))
}

async fn patch_cell(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let expected = expected_revision(&headers)?;
    let edit: CellPatch = parse_json(&body)?;
    let snap = state.store.update(&id, expected, false, |cur| apply_cell(cur.expect("exists"), &edit))?;
    Ok(envelope(&id, &snap, StatusCode::OK))
}

async fn compute_ahp(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let snap = state.store.get(&id)?;
    let req: ComputeRequest = parse_optional(&body)?;
    let analysis = analyze_ahp(&snap.project, &req.options())?;
    Ok(with_revision(snap.revision, analysis))
}

async fn compute_rank(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let snap = state.store.get(&id)?;
    let req: ComputeRequest = parse_optional(&body)?;
    let report = rank_project(&snap.project, &req.options())?;
    Ok(with_revision(snap.revision, report))
}

async fn compute_sensitivity(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let snap = state.store.get(&id)?;
    let spec: PerturbationSpec = parse_json(&body)?;
    let project = Arc::clone(&snap.project);
    let report = tokio::task::spawn_blocking(move || run_sensitivity_with(&project, &spec, &RunOptions::default()))
        .await
        .map_err(|e| ApiError::new("Internal", e.to_string()))??;
    Ok(with_revision(snap.revision, report))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/v1/projects/{id}", get(get_project).put(put_project))
        .route("/v1/projects/{id}/judgments", patch(patch_judgment))
        .route("/v1/projects/{id}/cells", patch(patch_cell))
        .route("/v1/projects/{id}/compute/ahp", post(compute_ahp))
        .route("/v1/projects/{id}/compute/rank", post(compute_rank))
        .route("/v1/projects/{id}/compute/sensitivity", post(compute_sensitivity))
        .with_state(state)
}

/// Serves until `shutdown` resolves, then drains in-flight requests.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: AppState,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}
