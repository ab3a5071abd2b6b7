//! Heightfield recovery from a displaced mesh.
//!
//! The displaced mesh must share topology with its undisplaced reference.
//! Each vertex's offset is projected onto its reference normal, the active
//! triangles are rasterized in uv space with barycentric interpolation, and
//! the grid is min-max normalized to `[0, 1]`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::heightfield::{BitDepth, Heightfield};
use crate::mesh::{dot, sub, TriMesh};
use crate::{par, ACTIVE_GROUP};

#[derive(Debug, thiserror::Error)]
pub enum ExtractError {
    #[error("topology mismatch: {0}")]
    TopologyMismatch(String),
    #[error("reference mesh has no uv coordinates")]
    MissingUvs,
    #[error("resolution must be positive, got {0}x{1}")]
    ZeroResolution(usize, usize),
    #[error("no active triangle covers any pixel")]
    NoCoverage,
}

/// Ranges below this (mm) are treated as flat.
pub const DEGENERATE_RANGE_MM: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub heightfield: Heightfield,
    /// Smallest rasterized displacement before normalization, mm.
    pub raw_min: f64,
    /// Largest rasterized displacement before normalization, mm.
    pub raw_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplacementStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Mean-centered root mean square.
    pub rms: f64,
}

fn check_topology(original: &TriMesh, modified: &TriMesh) -> Result<(), ExtractError> {
    if original.vertex_count() != modified.vertex_count() {
        return Err(ExtractError::TopologyMismatch(format!(
            "{} vs {} vertices",
            original.vertex_count(),
            modified.vertex_count()
        )));
    }
    if original.faces != modified.faces {
        return Err(ExtractError::TopologyMismatch("face indices differ".into()));
    }
    Ok(())
}

/// Faces that make up the stylizable region: the [`ACTIVE_GROUP`] group when
/// the mesh has one, otherwise every face.
pub fn active_faces(mesh: &TriMesh) -> Vec<usize> {
    mesh.group_faces(ACTIVE_GROUP)
        .unwrap_or_else(|| (0..mesh.face_count()).collect())
}

fn active_vertices(mesh: &TriMesh) -> Vec<usize> {
    mesh.group_vertices(ACTIVE_GROUP)
        .unwrap_or_else(|| (0..mesh.vertex_count()).collect())
}

/// Signed per-vertex displacement along the reference normals, mm.
pub fn signed_displacements(original: &TriMesh, modified: &TriMesh) -> Result<Vec<f64>, ExtractError> {
    check_topology(original, modified)?;
    Ok(par::map_range(original.vertex_count(), |i| {
        dot(sub(modified.vertices[i], original.vertices[i]), original.normals[i])
    }))
}

/// Displacement statistics over the active vertices.
pub fn raw_displacement_stats(
    original: &TriMesh,
    modified: &TriMesh,
) -> Result<DisplacementStats, ExtractError> {
    let d = signed_displacements(original, modified)?;
    let active = active_vertices(original);
    let samples: Vec<f64> = active.iter().map(|&i| d[i]).collect();
    Ok(summarize(&samples))
}

pub(crate) fn summarize(samples: &[f64]) -> DisplacementStats {
    if samples.is_empty() {
        return DisplacementStats {
            min: 0.0,
            max: 0.0,
            mean: 0.0,
            rms: 0.0,
        };
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let (min, max) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    DisplacementStats {
        min,
        max,
        mean,
        rms: var.sqrt(),
    }
}

struct UvTriangle {
    uv: [[f64; 2]; 3],
    d: [f64; 3],
    inv_area: f64,
}

/// Recovers a `width x height` heightfield from a displaced mesh.
///
/// Pixels not covered by any active triangle take the value of the nearest
/// covered pixel. Where triangles overlap, the later face wins. If the
/// displacement range is below [`DEGENERATE_RANGE_MM`] the result is all
/// zeros; `raw_min`/`raw_max` keep the physical values either way.
pub fn extract_heightfield(
    original: &TriMesh,
    modified: &TriMesh,
    resolution: (usize, usize),
) -> Result<Extraction, ExtractError> {
    let (width, height) = resolution;
    if width == 0 || height == 0 {
        return Err(ExtractError::ZeroResolution(width, height));
    }
    let d = signed_displacements(original, modified)?;
    let uvs = original.uvs.as_ref().ok_or(ExtractError::MissingUvs)?;

    let triangles: Vec<UvTriangle> = active_faces(original)
        .into_iter()
        .filter_map(|f| {
            let face = original.faces[f];
            let uv = face.map(|i| uvs[i]);
            let area = (uv[1][0] - uv[0][0]) * (uv[2][1] - uv[0][1])
                - (uv[2][0] - uv[0][0]) * (uv[1][1] - uv[0][1]);
            (area.abs() > 1e-18).then(|| UvTriangle {
                uv,
                d: face.map(|i| d[i]),
                inv_area: 1.0 / area,
            })
        })
        .collect();

    // bucket triangles by the pixel rows whose centers they can touch
    let mut rows: Vec<Vec<u32>> = vec![Vec::new(); height];
    for (t, tri) in triangles.iter().enumerate() {
        let vmin = tri.uv.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
        let vmax = tri.uv.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
        let Some((j0, j1)) = center_span(vmin, vmax, height) else {
            continue;
        };
        for row in &mut rows[j0..=j1] {
            row.push(t as u32);
        }
    }

    let mut grid = vec![f64::NAN; width * height];
    par::for_each_chunk_mut(&mut grid, width, |j, row| {
        let v = (j as f64 + 0.5) / height as f64;
        for &t in &rows[j] {
            let tri = &triangles[t as usize];
            let umin = tri.uv.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let umax = tri.uv.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            let Some((i0, i1)) = center_span(umin, umax, width) else {
                continue;
            };
            for (i, px) in row.iter_mut().enumerate().take(i1 + 1).skip(i0) {
                let u = (i as f64 + 0.5) / width as f64;
                if let Some(value) = tri.interpolate(u, v) {
                    *px = value;
                }
            }
        }
    });

    fill_nearest(&mut grid, width, height)?;

    let (raw_min, raw_max) = grid
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = raw_max - raw_min;
    let values = if range < DEGENERATE_RANGE_MM {
        vec![0.0; grid.len()]
    } else {
        grid.iter()
            .map(|&v| ((v - raw_min) / range).clamp(0.0, 1.0))
            .collect()
    };
    let heightfield = Heightfield::new(width, height, values, BitDepth::Sixteen)
        .expect("normalized grid is within [0, 1]");
    Ok(Extraction {
        heightfield,
        raw_min,
        raw_max,
    })
}

/// Inclusive index range of pixel centers `(k + 0.5) / size` inside `[lo, hi]`.
fn center_span(lo: f64, hi: f64, size: usize) -> Option<(usize, usize)> {
    let first = (lo * size as f64 - 0.5 - 1e-9).ceil().max(0.0);
    let last = (hi * size as f64 - 0.5 + 1e-9).floor().min(size as f64 - 1.0);
    if last < first || last < 0.0 {
        return None;
    }
    Some((first as usize, last as usize))
}

impl UvTriangle {
    fn interpolate(&self, u: f64, v: f64) -> Option<f64> {
        let [a, b, c] = self.uv;
        let w1 = ((u - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (v - a[1])) * self.inv_area;
        let w2 = ((b[0] - a[0]) * (v - a[1]) - (u - a[0]) * (b[1] - a[1])) * self.inv_area;
        let w0 = 1.0 - w1 - w2;
        const EPS: f64 = -1e-12;
        (w0 >= EPS && w1 >= EPS && w2 >= EPS).then(|| w0 * self.d[0] + w1 * self.d[1] + w2 * self.d[2])
    }
}

/// Multi-source breadth-first fill from covered (non-NaN) pixels over the
/// 8-neighborhood, visiting sources in row-major order.
fn fill_nearest(grid: &mut [f64], width: usize, height: usize) -> Result<(), ExtractError> {
    let mut queue: VecDeque<usize> = grid
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_nan())
        .map(|(i, _)| i)
        .collect();
    if queue.is_empty() {
        return Err(ExtractError::NoCoverage);
    }
    if queue.len() == grid.len() {
        return Ok(());
    }
    while let Some(idx) = queue.pop_front() {
        let (x, y) = ((idx % width) as isize, (idx / width) as isize);
        for (dx, dy) in [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (1, -1), (-1, 1), (1, 1)] {
            let (nx, ny) = (x + dx, y + dy);
            if nx < 0 || ny < 0 || nx >= width as isize || ny >= height as isize {
                continue;
            }
            let n = ny as usize * width + nx as usize;
            if grid[n].is_nan() {
                grid[n] = grid[idx];
                queue.push_back(n);
            }
        }
    }
    Ok(())
}
