//! Geometry stylization: displace vertices along their normals by heights
//! sampled through the uv map.

use serde::{Deserialize, Serialize};

use crate::heightfield::{Heightfield, TextureImage};
use crate::mesh::TriMesh;
use crate::{par, ACTIVE_GROUP};

#[derive(Debug, thiserror::Error)]
pub enum StylizeError {
    #[error("invalid displacement parameters: {0}")]
    InvalidParams(String),
    #[error("{} active vertices have no uv coordinates (first: {:?})", .0.len(), &.0[..(.0.len().min(8))])]
    MissingUvs(Vec<usize>),
    #[error("mesh has no `{0}` face group")]
    MissingGroup(String),
}

/// Controls for [`apply_heightfield`].
///
/// `amplitude_mm` is the physical height of a full-scale (1.0) sample at
/// magnification 1. It defaults to 1 mm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementParams {
    pub magnification: f64,
    pub amplitude_mm: f64,
    /// Vertices allowed to move. `None` means all of them.
    pub active_mask: Option<Vec<usize>>,
}

impl Default for DisplacementParams {
    fn default() -> Self {
        DisplacementParams {
            magnification: 1.0,
            amplitude_mm: 1.0,
            active_mask: None,
        }
    }
}

impl DisplacementParams {
    pub fn with_magnification(mut self, magnification: f64) -> Self {
        self.magnification = magnification;
        self
    }

    pub fn with_amplitude_mm(mut self, amplitude_mm: f64) -> Self {
        self.amplitude_mm = amplitude_mm;
        self
    }

    pub fn validate(&self, vertex_count: usize) -> Result<(), StylizeError> {
        if !(self.magnification.is_finite() && self.magnification >= 0.0) {
            return Err(StylizeError::InvalidParams(format!(
                "magnification must be finite and >= 0, got {}",
                self.magnification
            )));
        }
        if !(self.amplitude_mm.is_finite() && self.amplitude_mm > 0.0) {
            return Err(StylizeError::InvalidParams(format!(
                "amplitude_mm must be finite and > 0, got {}",
                self.amplitude_mm
            )));
        }
        if let Some(mask) = &self.active_mask {
            if let Some(&bad) = mask.iter().find(|&&i| i >= vertex_count) {
                return Err(StylizeError::InvalidParams(format!(
                    "mask index {bad} out of range for {vertex_count} vertices"
                )));
            }
        }
        Ok(())
    }

    fn active_flags(&self, vertex_count: usize) -> Vec<bool> {
        match &self.active_mask {
            None => vec![true; vertex_count],
            Some(mask) => {
                let mut flags = vec![false; vertex_count];
                for &i in mask {
                    flags[i] = true;
                }
                flags
            }
        }
    }
}

/// Displaces each active vertex by
/// `magnification * amplitude_mm * h(u, v) * normal`.
///
/// Frozen vertices, topology, uvs, colors and normals are copied unchanged.
/// Normals are intentionally left as the undisplaced ones; call
/// [`TriMesh::compute_normals`] on the result when shading normals are needed.
pub fn apply_heightfield(
    mesh: &TriMesh,
    h: &Heightfield,
    params: &DisplacementParams,
) -> Result<TriMesh, StylizeError> {
    let n = mesh.vertex_count();
    params.validate(n)?;
    let active = params.active_flags(n);
    let uvs = match &mesh.uvs {
        Some(uvs) => uvs,
        None => {
            let missing: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
            if missing.is_empty() {
                return Ok(mesh.clone());
            }
            return Err(StylizeError::MissingUvs(missing));
        }
    };

    let gain = params.magnification * params.amplitude_mm;
    let positions = par::map_range(n, |i| {
        let p = mesh.vertices[i];
        if !active[i] {
            return p;
        }
        let [u, v] = uvs[i];
        let offset = gain * h.sample_bilinear(u, v);
        let nrm = mesh.normals[i];
        [
            p[0] + offset * nrm[0],
            p[1] + offset * nrm[1],
            p[2] + offset * nrm[2],
        ]
    });

    Ok(TriMesh {
        vertices: positions,
        ..mesh.clone()
    })
}

/// Parameters whose active mask is the top face of a tile.
pub fn freeze_except_top(mesh: &TriMesh) -> Result<DisplacementParams, StylizeError> {
    let mask = mesh
        .group_vertices(ACTIVE_GROUP)
        .ok_or_else(|| StylizeError::MissingGroup(ACTIVE_GROUP.to_string()))?;
    Ok(DisplacementParams {
        active_mask: Some(mask),
        ..DisplacementParams::default()
    })
}

/// Color passthrough: bakes the texture into vertex colors by uv lookup.
pub fn bake_vertex_colors(mesh: &TriMesh, texture: &TextureImage) -> TriMesh {
    let mut out = mesh.clone();
    if let Some(uvs) = &mesh.uvs {
        out.colors = Some(par::map_slice(uvs, |uv| texture.sample_bilinear(uv[0], uv[1])));
    }
    out
}
