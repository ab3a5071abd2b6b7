//! Heightfield generators: texture in, heightfield out.
//!
//! Remote generators speak a small HTTP protocol:
//!
//! - `POST {endpoint}/generate[?size=WxH]` with a PNG texture body
//!   (`image/png`) answers `200` with a 16-bit grayscale PNG and an
//!   `X-Model-Version` header, or a non-200 status with a plain-text reason.
//! - `GET {endpoint}/health` answers `200` with `{"ok": bool, "model_version": str}`.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::heightfield::{Heightfield, ImageError, TextureImage};

pub const DEFAULT_TIMEOUT_MS: u64 = 30_000;
pub const MODEL_VERSION_HEADER: &str = "X-Model-Version";
/// Largest response body the client accepts.
const MAX_RESPONSE_BYTES: u64 = 256 << 20;

#[derive(Debug, thiserror::Error)]
pub enum GeneratorError {
    #[error("ground-truth passthrough needs a ground-truth heightfield")]
    MissingContext,
    #[error("invalid generator endpoint `{0}`: expected http(s)://host[:port][/path]")]
    InvalidEndpoint(String),
    #[error("unknown generator `{0}`: expected baseline, groundtruth or remote=URL")]
    UnknownKind(String),
    #[error("{endpoint}: timed out after {timeout_ms} ms")]
    Timeout { endpoint: String, timeout_ms: u64 },
    #[error("{endpoint}: {cause}")]
    Transport { endpoint: String, cause: String },
    #[error("{endpoint}: status {status}: {reason}")]
    Status {
        endpoint: String,
        status: u16,
        reason: String,
    },
    #[error("{endpoint}: invalid response: {cause}")]
    Payload { endpoint: String, cause: String },
    #[error("cannot encode texture: {0}")]
    Encode(#[source] ImageError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Grayscale of the texture.
    BaselineLuminance,
    /// The ground-truth heightfield, unchanged.
    GroundtruthPassthrough,
    Remote { endpoint: String, timeout_ms: u64 },
}

impl GeneratorKind {
    pub fn remote(endpoint: impl Into<String>, timeout: Duration) -> Result<Self, GeneratorError> {
        let endpoint = endpoint.into().trim_end_matches('/').to_string();
        check_endpoint(&endpoint)?;
        Ok(GeneratorKind::Remote {
            endpoint,
            timeout_ms: timeout.as_millis() as u64,
        })
    }

    /// Stable snake_case name.
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::BaselineLuminance => "baseline_luminance",
            GeneratorKind::GroundtruthPassthrough => "groundtruth_passthrough",
            GeneratorKind::Remote { .. } => "remote",
        }
    }

    /// Short label used in reports: `baseline`, `groundtruth` or the endpoint.
    pub fn label(&self) -> String {
        match self {
            GeneratorKind::BaselineLuminance => "baseline".into(),
            GeneratorKind::GroundtruthPassthrough => "groundtruth".into(),
            GeneratorKind::Remote { endpoint, .. } => format!("remote={endpoint}"),
        }
    }

    pub fn is_deterministic(&self) -> bool {
        !matches!(self, GeneratorKind::Remote { .. })
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Parses `baseline`, `groundtruth` or `remote=URL` (default timeout).
impl FromStr for GeneratorKind {
    type Err = GeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "baseline" | "baseline_luminance" => Ok(GeneratorKind::BaselineLuminance),
            "groundtruth" | "groundtruth_passthrough" => Ok(GeneratorKind::GroundtruthPassthrough),
            _ => match s.strip_prefix("remote=") {
                Some(url) => {
                    GeneratorKind::remote(url, Duration::from_millis(DEFAULT_TIMEOUT_MS))
                }
                None => Err(GeneratorError::UnknownKind(s.to_string())),
            },
        }
    }
}

fn check_endpoint(endpoint: &str) -> Result<(), GeneratorError> {
    let invalid = || GeneratorError::InvalidEndpoint(endpoint.to_string());
    let uri: ureq::http::Uri = endpoint.parse().map_err(|_| invalid())?;
    let scheme_ok = matches!(uri.scheme_str(), Some("http" | "https"));
    let host_ok = uri.host().is_some_and(|h| !h.is_empty());
    if !scheme_ok || !host_ok || uri.query().is_some() {
        return Err(invalid());
    }
    Ok(())
}

/// Runs `kind` on `texture`. `context` is the ground truth, required for the
/// passthrough; when present, remote generators are asked for its resolution.
pub fn generate(
    kind: &GeneratorKind,
    texture: &TextureImage,
    context: Option<&Heightfield>,
) -> Result<Heightfield, GeneratorError> {
    match kind {
        GeneratorKind::BaselineLuminance => Ok(texture.luminance()),
        GeneratorKind::GroundtruthPassthrough => {
            context.cloned().ok_or(GeneratorError::MissingContext)
        }
        GeneratorKind::Remote {
            endpoint,
            timeout_ms,
        } => {
            let client = RemoteClient::new(endpoint, Duration::from_millis(*timeout_ms))?;
            Ok(client.generate(texture, context.map(Heightfield::dims))?.heightfield)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HealthStatus {
    pub ok: bool,
    #[serde(default)]
    pub model_version: Option<String>,
    /// Why the check failed, when it did.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Queries `GET {endpoint}/health`. Never fails: problems become `ok = false`.
pub fn health_check(endpoint: &str, timeout: Duration) -> HealthStatus {
    match RemoteClient::new(endpoint, timeout).and_then(|c| c.health()) {
        Ok(status) => status,
        Err(e) => HealthStatus {
            ok: false,
            model_version: None,
            error: Some(e.to_string()),
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemoteOutput {
    pub heightfield: Heightfield,
    pub model_version: Option<String>,
}

#[derive(Deserialize)]
struct HealthDoc {
    ok: bool,
    model_version: String,
}

/// Blocking client for one remote generator.
#[derive(Debug, Clone)]
pub struct RemoteClient {
    endpoint: String,
    timeout: Duration,
    agent: ureq::Agent,
}

impl RemoteClient {
    pub fn new(endpoint: &str, timeout: Duration) -> Result<Self, GeneratorError> {
        let endpoint = endpoint.trim_end_matches('/').to_string();
        check_endpoint(&endpoint)?;
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(RemoteClient {
            endpoint,
            timeout,
            agent,
        })
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn transport(&self, e: ureq::Error) -> GeneratorError {
        match e {
            ureq::Error::Timeout(_) => GeneratorError::Timeout {
                endpoint: self.endpoint.clone(),
                timeout_ms: self.timeout.as_millis() as u64,
            },
            ureq::Error::Io(ref io) if io.kind() == std::io::ErrorKind::TimedOut => {
                GeneratorError::Timeout {
                    endpoint: self.endpoint.clone(),
                    timeout_ms: self.timeout.as_millis() as u64,
                }
            }
            other => GeneratorError::Transport {
                endpoint: self.endpoint.clone(),
                cause: other.to_string(),
            },
        }
    }

    fn payload(&self, cause: impl fmt::Display) -> GeneratorError {
        GeneratorError::Payload {
            endpoint: self.endpoint.clone(),
            cause: cause.to_string(),
        }
    }

    fn read_body(&self, resp: &mut ureq::http::Response<ureq::Body>) -> Result<Vec<u8>, GeneratorError> {
        resp.body_mut()
            .with_config()
            .limit(MAX_RESPONSE_BYTES)
            .read_to_vec()
            .map_err(|e| self.transport(e))
    }

    fn check_status(&self, resp: &mut ureq::http::Response<ureq::Body>) -> Result<(), GeneratorError> {
        let status = resp.status().as_u16();
        if status == 200 {
            return Ok(());
        }
        let body = self.read_body(resp).unwrap_or_default();
        let reason = String::from_utf8_lossy(&body).trim().chars().take(512).collect();
        Err(GeneratorError::Status {
            endpoint: self.endpoint.clone(),
            status,
            reason,
        })
    }

    /// Sends `texture`; the response is decoded and validated before returning.
    pub fn generate(
        &self,
        texture: &TextureImage,
        size: Option<(usize, usize)>,
    ) -> Result<RemoteOutput, GeneratorError> {
        let body = texture.to_png_bytes().map_err(GeneratorError::Encode)?;
        let mut req = self
            .agent
            .post(format!("{}/generate", self.endpoint))
            .content_type("image/png");
        if let Some((w, h)) = size {
            req = req.query("size", format!("{w}x{h}"));
        }
        let mut resp = req.send(&body[..]).map_err(|e| self.transport(e))?;
        self.check_status(&mut resp)?;
        let model_version = resp
            .headers()
            .get(MODEL_VERSION_HEADER)
            .and_then(|v| v.to_str().ok())
            .map(str::to_string);
        let bytes = self.read_body(&mut resp)?;
        let heightfield = Heightfield::from_png_bytes(&bytes).map_err(|e| self.payload(e))?;
        if let Some((w, h)) = size {
            if heightfield.dims() != (w, h) {
                return Err(self.payload(format!(
                    "requested {w}x{h}, got {}x{}",
                    heightfield.width(),
                    heightfield.height()
                )));
            }
        }
        Ok(RemoteOutput {
            heightfield,
            model_version,
        })
    }

    pub fn health(&self) -> Result<HealthStatus, GeneratorError> {
        let mut resp = self
            .agent
            .get(format!("{}/health", self.endpoint))
            .call()
            .map_err(|e| self.transport(e))?;
        self.check_status(&mut resp)?;
        let bytes = self.read_body(&mut resp)?;
        let doc: HealthDoc = serde_json::from_slice(&bytes).map_err(|e| self.payload(e))?;
        Ok(HealthStatus {
            ok: doc.ok,
            model_version: Some(doc.model_version),
            error: None,
        })
    }
}
