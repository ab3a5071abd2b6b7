//! Flat test tiles: an axis-aligned box whose top face is a fine grid.

use super::{FaceGroups, MeshError, TriMesh, Vec3};
use crate::ACTIVE_GROUP;

/// Name of the group holding every non-top face of a tile.
pub const FROZEN_GROUP: &str = "frozen";

fn tile_face_count(level: u32) -> usize {
    let n = 1usize << level;
    2 * n * n + 4 * (n + 1) + 2
}

/// Smallest grid level `k` (top face split into `2^k x 2^k` cells) whose tile
/// has at least `target_faces` faces.
pub fn tile_subdivision_level(target_faces: usize) -> u32 {
    let mut k = 0;
    while tile_face_count(k) < target_faces {
        k += 1;
    }
    k
}

/// Builds a closed box of the given extents (mm) with its minimum corner at the
/// origin.
///
/// The top (+Z) face is a regular grid equivalent to repeated midpoint
/// subdivision of its two triangles, refined until the whole tile has at least
/// `target_faces` faces. Each box face owns its vertices, so top vertices
/// carry +Z normals and uvs spanning `[0, 1]^2`. Top faces are in the
/// [`ACTIVE_GROUP`] group, all others in [`FROZEN_GROUP`]. Side walls are fans
/// that share the top boundary positions, so the surface has no cracks.
pub fn make_tile(size_mm: Vec3, target_faces: usize) -> Result<TriMesh, MeshError> {
    if !size_mm.iter().all(|&s| s.is_finite() && s > 0.0) {
        return Err(MeshError::InvalidExtents(size_mm));
    }
    let [sx, sy, sz] = size_mm;
    let level = tile_subdivision_level(target_faces);
    let n = 1usize << level;
    let grid = |i: usize, j: usize| -> [f64; 2] {
        [sx * i as f64 / n as f64, sy * j as f64 / n as f64]
    };

    let mut vertices: Vec<Vec3> = Vec::with_capacity((n + 1) * (n + 1) + 4 * (n + 3) + 4);
    let mut faces: Vec<[usize; 3]> = Vec::with_capacity(tile_face_count(level));
    let mut face_group: Vec<u32> = Vec::with_capacity(tile_face_count(level));

    // top grid, row-major in j
    for j in 0..=n {
        for i in 0..=n {
            let [x, y] = grid(i, j);
            vertices.push([x, y, sz]);
        }
    }
    let top = |i: usize, j: usize| j * (n + 1) + i;
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (top(i, j), top(i + 1, j), top(i + 1, j + 1), top(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    face_group.resize(faces.len(), 0);

    // sides walk the boundary so that edge x up points outward
    let sides: [Vec<(usize, usize)>; 4] = [
        (0..=n).map(|i| (i, 0)).collect(),
        (0..=n).map(|j| (n, j)).collect(),
        (0..=n).map(|i| (n - i, n)).collect(),
        (0..=n).map(|j| (0, n - j)).collect(),
    ];
    for edge in &sides {
        let base = vertices.len();
        let (first, last) = (edge[0], edge[n]);
        let [x0, y0] = grid(first.0, first.1);
        let [x1, y1] = grid(last.0, last.1);
        vertices.push([x0, y0, 0.0]);
        vertices.push([x1, y1, 0.0]);
        for &(i, j) in edge {
            let [x, y] = grid(i, j);
            vertices.push([x, y, sz]);
        }
        let (b0, b1) = (base, base + 1);
        let t = |k: usize| base + 2 + k;
        let mid = n / 2;
        for k in 0..n {
            let pivot = if k < mid { b0 } else { b1 };
            faces.push([pivot, t(k + 1), t(k)]);
        }
        faces.push([b0, b1, t(mid)]);
    }

    let base = vertices.len();
    for (i, j) in [(0, 0), (n, 0), (n, n), (0, n)] {
        let [x, y] = grid(i, j);
        vertices.push([x, y, 0.0]);
    }
    faces.push([base, base + 2, base + 1]);
    faces.push([base, base + 3, base + 2]);
    face_group.resize(faces.len(), 1);

    let uvs = vertices
        .iter()
        .map(|p| [p[0] / sx, 1.0 - p[1] / sy])
        .collect();
    let count = vertices.len();
    let mut mesh = TriMesh {
        vertices,
        faces,
        normals: vec![[0.0, 0.0, 1.0]; count],
        uvs: Some(uvs),
        colors: None,
        groups: Some(FaceGroups {
            names: vec![ACTIVE_GROUP.to_string(), FROZEN_GROUP.to_string()],
            face_group,
        }),
    };
    mesh.compute_normals();
    mesh.validate()?;
    Ok(mesh)
}
