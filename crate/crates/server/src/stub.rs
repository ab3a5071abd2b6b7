//! Stand-in for the remote heightfield model, speaking the same wire
//! protocol:
//!
//! - `POST /generate[?size=WxH]` with a PNG texture returns a 16-bit
//!   grayscale PNG and an `X-Model-Version` header; failures are non-200
//!   with a plain-text reason.
//! - `GET /health` returns `{ok, model_version}`.
//!
//! By default the stub answers with the texture's luminance (resampled to
//! the requested size). A fixed field, an artificial delay and a forced
//! failure can be configured for contract tests.

use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tactile_core::generator::MODEL_VERSION_HEADER;
use tactile_core::{BitDepth, Heightfield, TextureImage};

#[derive(Debug, Clone)]
pub struct StubConfig {
    pub model_version: String,
    /// Applied before every response, health included.
    pub delay: Duration,
    /// Returned verbatim instead of the luminance.
    pub field: Option<Heightfield>,
    /// Status and reason returned by `/generate` instead of a heightfield.
    pub failure: Option<(u16, String)>,
}

impl Default for StubConfig {
    fn default() -> Self {
        StubConfig {
            model_version: "stub-1".into(),
            delay: Duration::ZERO,
            field: None,
            failure: None,
        }
    }
}

pub fn router(config: StubConfig) -> Router {
    Router::new()
        .route("/generate", post(generate))
        .route("/health", get(health))
        .with_state(Arc::new(config))
}

#[derive(Debug, Deserialize)]
struct GenerateQuery {
    size: Option<String>,
}

fn parse_size(s: &str) -> Option<(usize, usize)> {
    let (w, h) = s.split_once('x')?;
    let (w, h) = (w.parse().ok()?, h.parse().ok()?);
    (w > 0 && h > 0).then_some((w, h))
}

fn text(status: StatusCode, reason: impl Into<String>) -> Response {
    (status, [(header::CONTENT_TYPE, "text/plain")], reason.into()).into_response()
}

async fn generate(State(cfg): State<Arc<StubConfig>>, Query(q): Query<GenerateQuery>, body: Bytes) -> Response {
    tokio::time::sleep(cfg.delay).await;
    if let Some((status, reason)) = &cfg.failure {
        let status = StatusCode::from_u16(*status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        return text(status, reason.clone());
    }
    let size = match q.size.as_deref().map(|s| parse_size(s).ok_or(s)) {
        Some(Err(bad)) => return text(StatusCode::BAD_REQUEST, format!("bad size `{bad}`, expected WxH")),
        Some(Ok(wh)) => Some(wh),
        None => None,
    };
    let texture = match TextureImage::from_png_bytes(&body) {
        Ok(t) => t,
        Err(e) => return text(StatusCode::BAD_REQUEST, format!("texture is not a PNG: {e}")),
    };
    let field = match &cfg.field {
        Some(f) => f.clone(),
        None => {
            let lum = texture.luminance();
            match size {
                Some((w, h)) if (w, h) != lum.dims() => lum.resample(w, h),
                _ => lum,
            }
        }
    };
    match field.to_png_bytes(BitDepth::Sixteen) {
        Ok(png) => (
            [(header::CONTENT_TYPE, "image/png")],
            [(MODEL_VERSION_HEADER, cfg.model_version.clone())],
            png,
        )
            .into_response(),
        Err(e) => text(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

async fn health(State(cfg): State<Arc<StubConfig>>) -> Json<serde_json::Value> {
    tokio::time::sleep(cfg.delay).await;
    Json(json!({ "ok": true, "model_version": cfg.model_version }))
}
