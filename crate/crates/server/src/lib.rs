//! HTTP services around `tactile-core`: the studio API used by the web
//! front end, and a stub of the remote heightfield generator.

pub mod api;
pub mod session;
pub mod stub;

use std::net::SocketAddr;
use std::num::NonZeroUsize;
use std::sync::Arc;

use axum::Router;
use tactile_core::generator::GeneratorKind;

pub use api::{ApiError, AppState};
pub use session::{Session, SessionStore};
pub use stub::StubConfig;

/// Version of every JSON document the studio API emits.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct ServerConfig {
    /// Uploaded meshes are subdivided to at least this many faces.
    pub target_faces: usize,
    pub amplitude_mm: f64,
    pub session_capacity: NonZeroUsize,
    pub max_body_bytes: usize,
    /// Allowed CORS origin; `None` allows any.
    pub cors_origin: Option<String>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            target_faces: 25_000,
            amplitude_mm: 1.0,
            session_capacity: NonZeroUsize::new(64).unwrap(),
            max_body_bytes: 64 << 20,
            cors_origin: None,
        }
    }
}

pub fn studio_router(generator: GeneratorKind, config: ServerConfig) -> Router {
    let state = AppState {
        sessions: SessionStore::new(config.session_capacity),
        generator,
        config,
    };
    api::router(Arc::new(state))
}

/// Serves `router` on `addr` until the process is stopped.
pub async fn serve(addr: SocketAddr, router: Router) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router).await
}

/// A server running on its own thread and runtime; shut down on drop.
///
/// Lets synchronous callers (tests, the CLI) stand up a local service.
pub struct BackgroundServer {
    addr: SocketAddr,
    shutdown: Option<tokio::sync::oneshot::Sender<()>>,
    thread: Option<std::thread::JoinHandle<()>>,
}

impl BackgroundServer {
    /// Binds `127.0.0.1` on an ephemeral port.
    pub fn spawn(router: Router) -> std::io::Result<Self> {
        let rt = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()?;
        let listener = rt.block_on(tokio::net::TcpListener::bind(("127.0.0.1", 0)))?;
        let addr = listener.local_addr()?;
        let (tx, rx) = tokio::sync::oneshot::channel::<()>();
        let thread = std::thread::spawn(move || {
            rt.block_on(async move {
                let shutdown = async {
                    let _ = rx.await;
                };
                if let Err(e) = axum::serve(listener, router).with_graceful_shutdown(shutdown).await {
                    log::error!("background server: {e}");
                }
            })
        });
        Ok(BackgroundServer {
            addr,
            shutdown: Some(tx),
            thread: Some(thread),
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }
}

impl Drop for BackgroundServer {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}
