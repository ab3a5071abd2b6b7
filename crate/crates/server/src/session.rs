//! In-memory session store.

use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use lru::LruCache;
use tactile_core::mesh::{normalize_unit_cube, denormalize, subdivide_to, MeshError};
use tactile_core::{freeze_except_top, DisplacementParams, Heightfield, TextureImage, TriMesh, ACTIVE_GROUP};

/// One user's mesh, texture and latest stylization.
#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub original_mesh: TriMesh,
    pub texture: Option<TextureImage>,
    pub heightfield: Option<Heightfield>,
    /// Present only after a successful stylize.
    pub stylized_mesh: Option<TriMesh>,
    pub params: DisplacementParams,
}

impl Session {
    /// Preprocesses an uploaded mesh: unit-cube normalization and midpoint
    /// subdivision to `target_faces`, then back to the uploaded units so
    /// displacement amplitudes stay in millimetres. Meshes without uvs get
    /// planar ones.
    pub fn new(id: String, mesh: &TriMesh, target_faces: usize, amplitude_mm: f64) -> Result<Self, MeshError> {
        let (unit, transform) = normalize_unit_cube(mesh)?;
        let fine = if unit.face_count() < target_faces {
            subdivide_to(&unit, target_faces)?
        } else {
            unit
        };
        let mut original = denormalize(&fine, &transform);
        if original.uvs.is_none() {
            original.planar_uvs();
        }
        // tiles keep their frozen walls; anything else is stylized everywhere
        let params = match original.group_faces(ACTIVE_GROUP) {
            Some(_) => freeze_except_top(&original).expect("group exists"),
            None => DisplacementParams::default(),
        };
        Ok(Session {
            id,
            original_mesh: original,
            texture: None,
            heightfield: None,
            stylized_mesh: None,
            params: params.with_amplitude_mm(amplitude_mm),
        })
    }
}

pub type SessionHandle = Arc<tokio::sync::Mutex<Session>>;

/// Bounded store; the least recently used session is evicted when full.
///
/// Each session sits behind its own async mutex so requests against one
/// session are serialized while different sessions proceed concurrently.
pub struct SessionStore {
    inner: Mutex<LruCache<String, SessionHandle>>,
}

impl SessionStore {
    pub fn new(capacity: NonZeroUsize) -> Self {
        SessionStore {
            inner: Mutex::new(LruCache::new(capacity)),
        }
    }

    pub fn insert(&self, session: Session) -> SessionHandle {
        let id = session.id.clone();
        let handle = Arc::new(tokio::sync::Mutex::new(session));
        if let Some((old, _)) = self.lock().push(id, handle.clone()) {
            log::info!("evicted session {old}");
        }
        handle
    }

    pub fn get(&self, id: &str) -> Option<SessionHandle> {
        self.lock().get(id).cloned()
    }

    pub fn len(&self) -> usize {
        self.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, LruCache<String, SessionHandle>> {
        self.inner.lock().unwrap_or_else(|p| p.into_inner())
    }
}
