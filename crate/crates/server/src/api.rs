//! Studio HTTP API.
//!
//! | route                                   | body          | response                      |
//! |-----------------------------------------|---------------|-------------------------------|
//! | `POST /sessions`                        | OBJ text      | `{session_id, vertex_count, face_count}` |
//! | `POST /sessions/{id}/texture`           | PNG           | `{status, generator, width, height}` |
//! | `POST /sessions/{id}/stylize`           | `{magnification}` | `{rms, vertex_count, magnification}` |
//! | `GET /sessions/{id}/mesh?which=original\|stylized` | | OBJ                          |
//! | `GET /sessions/{id}/heightfield`        |               | 16-bit grayscale PNG          |
//! | `GET /health`                           |               | `{ok, generator}`             |
//!
//! Every JSON body carries `schema_version`. Errors are
//! `{schema_version, error: {code, message}}` with 400 for malformed input,
//! 404 for unknown sessions, 409 for out-of-order calls and 502 when the
//! heightfield generator fails.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tactile_core::generator::{generate, GeneratorError, GeneratorKind};
use tactile_core::mesh::{parse_obj, write_obj};
use tactile_core::{apply_heightfield, raw_displacement_stats, BitDepth, TextureImage};
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::session::{Session, SessionStore};
use crate::{ServerConfig, SCHEMA_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("{0}")]
    BadRequest(String),
    #[error("unknown session `{0}`")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error("{0}")]
    Internal(String),
}

impl ApiError {
    fn status(&self) -> StatusCode {
        match self {
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::Conflict(_) => StatusCode::CONFLICT,
            ApiError::Generator(_) => StatusCode::BAD_GATEWAY,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    fn code(&self) -> &'static str {
        match self {
            ApiError::BadRequest(_) => "bad_request",
            ApiError::NotFound(_) => "not_found",
            ApiError::Conflict(_) => "conflict",
            ApiError::Generator(_) => "generator_failed",
            ApiError::Internal(_) => "internal",
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({
            "schema_version": SCHEMA_VERSION,
            "error": { "code": self.code(), "message": self.to_string() },
        });
        (self.status(), Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub struct AppState {
    pub sessions: SessionStore,
    pub generator: GeneratorKind,
    pub config: ServerConfig,
}

pub fn router(state: Arc<AppState>) -> Router {
    let cors = match &state.config.cors_origin {
        Some(origin) => CorsLayer::new().allow_origin(AllowOrigin::exact(
            HeaderValue::from_str(origin).unwrap_or(HeaderValue::from_static("null")),
        )),
        None => CorsLayer::new().allow_origin(AllowOrigin::any()),
    }
    .allow_methods([axum::http::Method::GET, axum::http::Method::POST])
    .allow_headers([header::CONTENT_TYPE]);

    Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/texture", post(upload_texture))
        .route("/sessions/{id}/stylize", post(stylize))
        .route("/sessions/{id}/mesh", get(download_mesh))
        .route("/sessions/{id}/heightfield", get(download_heightfield))
        .layer(DefaultBodyLimit::max(state.config.max_body_bytes))
        .layer(cors)
        .with_state(state)
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::Internal(format!("worker failed: {e}")))
}

fn session(state: &AppState, id: &str) -> ApiResult<crate::session::SessionHandle> {
    state.sessions.get(id).ok_or_else(|| ApiError::NotFound(id.to_string()))
}

async fn health(State(state): State<Arc<AppState>>) -> Json<serde_json::Value> {
    Json(json!({
        "schema_version": SCHEMA_VERSION,
        "ok": true,
        "generator": state.generator.name(),
    }))
}

async fn create_session(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult<impl IntoResponse> {
    let text = String::from_utf8(body.to_vec()).map_err(|_| ApiError::BadRequest("OBJ body must be UTF-8".into()))?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let (target, amplitude) = (state.config.target_faces, state.config.amplitude_mm);
    let sid = id.clone();
    let session = blocking(move || {
        let mesh = parse_obj(&text, "upload.obj")?;
        Session::new(sid, &mesh, target, amplitude)
    })
    .await?
    .map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let (vertex_count, face_count) = (session.original_mesh.vertex_count(), session.original_mesh.face_count());
    state.sessions.insert(session);
    log::info!("session {id}: {vertex_count} vertices, {face_count} faces");
    Ok((
        StatusCode::CREATED,
        Json(json!({
            "schema_version": SCHEMA_VERSION,
            "session_id": id,
            "vertex_count": vertex_count,
            "face_count": face_count,
        })),
    ))
}

async fn upload_texture(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<serde_json::Value>> {
    let handle = session(&state, &id)?;
    let texture = TextureImage::from_png_bytes(&body).map_err(|e| ApiError::BadRequest(format!("texture: {e}")))?;
    let mut s = handle.lock().await;
    let kind = state.generator.clone();
    let tex = texture.clone();
    let heightfield = blocking(move || generate(&kind, &tex, None)).await??;
    let (width, height) = heightfield.dims();
    s.texture = Some(texture);
    s.heightfield = Some(heightfield);
    // an older stylization no longer matches the texture
    s.stylized_mesh = None;
    Ok(Json(json!({
        "schema_version": SCHEMA_VERSION,
        "status": "ready",
        "generator": state.generator.name(),
        "width": width,
        "height": height,
    })))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StylizeRequest {
    magnification: f64,
}

#[derive(Debug, Serialize)]
struct StylizeResponse {
    schema_version: u32,
    /// Mean-centered RMS of the vertex displacements, mm.
    rms: f64,
    vertex_count: usize,
    magnification: f64,
}

async fn stylize(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<StylizeResponse>> {
    let req: StylizeRequest =
        serde_json::from_slice(&body).map_err(|e| ApiError::BadRequest(format!("stylize body: {e}")))?;
    let handle = session(&state, &id)?;
    let mut s = handle.lock().await;
    let heightfield = s
        .heightfield
        .clone()
        .ok_or_else(|| ApiError::Conflict("upload a texture before stylizing".into()))?;
    let params = s.params.clone().with_magnification(req.magnification);
    params
        .validate(s.original_mesh.vertex_count())
        .map_err(|e| ApiError::BadRequest(e.to_string()))?;
    // always from the original, so slider moves never accumulate
    let original = s.original_mesh.clone();
    let p = params.clone();
    let (stylized, stats) = blocking(move || {
        let stylized = apply_heightfield(&original, &heightfield, &p).map_err(|e| e.to_string())?;
        let stats = raw_displacement_stats(&original, &stylized).map_err(|e| e.to_string())?;
        Ok::<_, String>((stylized, stats))
    })
    .await?
    .map_err(ApiError::Internal)?;
    let vertex_count = stylized.vertex_count();
    s.stylized_mesh = Some(stylized);
    s.params = params;
    Ok(Json(StylizeResponse {
        schema_version: SCHEMA_VERSION,
        rms: stats.rms,
        vertex_count,
        magnification: req.magnification,
    }))
}

#[derive(Debug, Deserialize)]
struct MeshQuery {
    which: Option<String>,
}

async fn download_mesh(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<MeshQuery>,
) -> ApiResult<Response> {
    let handle = session(&state, &id)?;
    let s = handle.lock().await;
    let mesh = match q.which.as_deref().unwrap_or("stylized") {
        "original" => &s.original_mesh,
        "stylized" => s
            .stylized_mesh
            .as_ref()
            .ok_or_else(|| ApiError::Conflict("session has not been stylized".into()))?,
        other => return Err(ApiError::BadRequest(format!("which must be original or stylized, got `{other}`"))),
    };
    let text = write_obj(mesh);
    Ok(([(header::CONTENT_TYPE, "model/obj")], text).into_response())
}

async fn download_heightfield(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let handle = session(&state, &id)?;
    let s = handle.lock().await;
    let h = s
        .heightfield
        .as_ref()
        .ok_or_else(|| ApiError::Conflict("upload a texture first".into()))?;
    let png = h
        .to_png_bytes(BitDepth::Sixteen)
        .map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok(([(header::CONTENT_TYPE, "image/png")], png).into_response())
}
