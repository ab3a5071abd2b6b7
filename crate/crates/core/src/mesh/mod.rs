//! Indexed triangle meshes: validation, normals, unit-cube normalization and
//! midpoint subdivision.
//!
//! Positions are millimetres. Per-vertex attributes (normals, uvs, colors) are
//! stored in parallel arrays indexed like `vertices`.

mod obj;
mod tile;

use std::collections::HashMap;
use std::path::PathBuf;

pub use obj::{load_obj, parse_obj, save_obj, write_obj};
pub use tile::{make_tile, tile_subdivision_level};

pub type Vec3 = [f64; 3];

#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("mesh has no faces")]
    Empty,
    #[error("face {face} references vertex {index} but the mesh has {count} vertices")]
    IndexOutOfRange {
        face: usize,
        index: usize,
        count: usize,
    },
    #[error("non-finite {attribute} at vertex {vertex}")]
    NonFinite {
        attribute: &'static str,
        vertex: usize,
    },
    #[error("{attribute} has {found} entries, expected {expected}")]
    AttributeLength {
        attribute: &'static str,
        found: usize,
        expected: usize,
    },
    #[error("mesh bounding box has zero extent")]
    ZeroExtent,
    #[error("target face count {target} is below the current count {current}")]
    TargetBelowCurrent { target: usize, current: usize },
    #[error("invalid tile extents {0:?}")]
    InvalidExtents(Vec3),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Named face groups. `face_group[f]` indexes into `names`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceGroups {
    pub names: Vec<String>,
    pub face_group: Vec<u32>,
}

impl FaceGroups {
    pub fn group_id(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
    pub normals: Vec<Vec3>,
    pub uvs: Option<Vec<[f64; 2]>>,
    pub colors: Option<Vec<Vec3>>,
    pub groups: Option<FaceGroups>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: Vec3,
    pub max: Vec3,
}

impl BoundingBox {
    pub fn extent(&self) -> Vec3 {
        sub(self.max, self.min)
    }

    pub fn center(&self) -> Vec3 {
        scale(add(self.min, self.max), 0.5)
    }

    pub fn max_extent(&self) -> f64 {
        let e = self.extent();
        e[0].max(e[1]).max(e[2])
    }
}

/// Inverse data for [`normalize_unit_cube`]: `normalized = (p - center) * scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitCubeTransform {
    pub scale: f64,
    pub center: Vec3,
}

impl UnitCubeTransform {
    pub fn translation(&self) -> Vec3 {
        scale(self.center, -1.0)
    }

    pub fn apply(&self, p: Vec3) -> Vec3 {
        scale(sub(p, self.center), self.scale)
    }

    pub fn invert(&self, p: Vec3) -> Vec3 {
        add(scale(p, 1.0 / self.scale), self.center)
    }
}

/// Vertices whose normal fell back to +Z because no face touches them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormalsReport {
    pub isolated: Vec<usize>,
}

impl TriMesh {
    /// Builds a mesh from positions and faces and computes normals.
    pub fn from_parts(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let mut mesh = TriMesh {
            normals: vec![[0.0, 0.0, 1.0]; vertices.len()],
            vertices,
            faces,
            uvs: None,
            colors: None,
            groups: None,
        };
        mesh.compute_normals();
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        if self.faces.is_empty() {
            return Err(MeshError::Empty);
        }
        let n = self.vertices.len();
        for (f, face) in self.faces.iter().enumerate() {
            if let Some(&index) = face.iter().find(|&&i| i >= n) {
                return Err(MeshError::IndexOutOfRange {
                    face: f,
                    index,
                    count: n,
                });
            }
        }
        check_len("normals", self.normals.len(), n)?;
        if let Some(uvs) = &self.uvs {
            check_len("uvs", uvs.len(), n)?;
        }
        if let Some(colors) = &self.colors {
            check_len("colors", colors.len(), n)?;
        }
        if let Some(groups) = &self.groups {
            check_len("face groups", groups.face_group.len(), self.faces.len())?;
        }
        for i in 0..n {
            if !self.vertices[i].iter().all(|c| c.is_finite()) {
                return Err(MeshError::NonFinite {
                    attribute: "position",
                    vertex: i,
                });
            }
            if !self.normals[i].iter().all(|c| c.is_finite()) {
                return Err(MeshError::NonFinite {
                    attribute: "normal",
                    vertex: i,
                });
            }
            if let Some(uvs) = &self.uvs {
                if !uvs[i].iter().all(|c| c.is_finite()) {
                    return Err(MeshError::NonFinite {
                        attribute: "uv",
                        vertex: i,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn bounding_box(&self) -> BoundingBox {
        let mut min = [f64::INFINITY; 3];
        let mut max = [f64::NEG_INFINITY; 3];
        for p in &self.vertices {
            for k in 0..3 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        BoundingBox { min, max }
    }

    /// Sets every vertex normal to the normalized area-weighted mean of the
    /// incident face normals. Vertices without faces get +Z.
    pub fn compute_normals(&mut self) -> NormalsReport {
        let mut acc = vec![[0.0f64; 3]; self.vertices.len()];
        let mut touched = vec![false; self.vertices.len()];
        for face in &self.faces {
            // cross product length is twice the area, so this is area weighting
            let n = face_cross(&self.vertices, face);
            for &i in face {
                acc[i] = add(acc[i], n);
                touched[i] = true;
            }
        }
        let mut report = NormalsReport::default();
        self.normals = acc
            .into_iter()
            .enumerate()
            .map(|(i, n)| {
                let len = norm(n);
                if !touched[i] || len < 1e-300 {
                    report.isolated.push(i);
                    [0.0, 0.0, 1.0]
                } else {
                    scale(n, 1.0 / len)
                }
            })
            .collect();
        if !report.isolated.is_empty() {
            log::warn!(
                "{} vertices have no incident face area, normals set to +Z",
                report.isolated.len()
            );
        }
        report
    }

    /// Total area of all faces.
    pub fn surface_area(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| 0.5 * norm(face_cross(&self.vertices, f)))
            .sum()
    }

    /// Faces belonging to the named group, in face order.
    pub fn group_faces(&self, name: &str) -> Option<Vec<usize>> {
        let groups = self.groups.as_ref()?;
        let id = groups.group_id(name)?;
        Some(
            groups
                .face_group
                .iter()
                .enumerate()
                .filter(|&(_, &g)| g == id)
                .map(|(f, _)| f)
                .collect(),
        )
    }

    /// Sorted, deduplicated vertex indices referenced by the named group.
    pub fn group_vertices(&self, name: &str) -> Option<Vec<usize>> {
        let faces = self.group_faces(name)?;
        let mut used = vec![false; self.vertices.len()];
        for f in faces {
            for &i in &self.faces[f] {
                used[i] = true;
            }
        }
        Some(
            used.iter()
                .enumerate()
                .filter(|(_, &u)| u)
                .map(|(i, _)| i)
                .collect(),
        )
    }

    /// Assigns planar uvs from the XY footprint of the bounding box, with `v`
    /// running top-down in image space. Existing uvs are replaced.
    pub fn planar_uvs(&mut self) {
        let bb = self.bounding_box();
        let ext = bb.extent();
        let sx = if ext[0] > 0.0 { ext[0] } else { 1.0 };
        let sy = if ext[1] > 0.0 { ext[1] } else { 1.0 };
        self.uvs = Some(
            self.vertices
                .iter()
                .map(|p| [(p[0] - bb.min[0]) / sx, 1.0 - (p[1] - bb.min[1]) / sy])
                .collect(),
        );
    }
}

fn check_len(attribute: &'static str, found: usize, expected: usize) -> Result<(), MeshError> {
    if found != expected {
        return Err(MeshError::AttributeLength {
            attribute,
            found,
            expected,
        });
    }
    Ok(())
}

/// Scales the mesh so its longest axis is exactly 1 and centers its bounding
/// box at the origin.
pub fn normalize_unit_cube(mesh: &TriMesh) -> Result<(TriMesh, UnitCubeTransform), MeshError> {
    let bb = mesh.bounding_box();
    let extent = bb.max_extent();
    if !(extent.is_finite() && extent > 0.0) {
        return Err(MeshError::ZeroExtent);
    }
    let transform = UnitCubeTransform {
        scale: 1.0 / extent,
        center: bb.center(),
    };
    let mut out = mesh.clone();
    for p in &mut out.vertices {
        *p = transform.apply(*p);
    }
    Ok((out, transform))
}

/// Applies the inverse of a [`normalize_unit_cube`] transform.
pub fn denormalize(mesh: &TriMesh, transform: &UnitCubeTransform) -> TriMesh {
    let mut out = mesh.clone();
    for p in &mut out.vertices {
        *p = transform.invert(*p);
    }
    out
}

/// Number of 1:4 rounds needed to reach `target` faces from `current`.
pub fn subdivision_rounds(current: usize, target: usize) -> u32 {
    let mut k = 0;
    let mut count = current;
    while count < target {
        count *= 4;
        k += 1;
    }
    k
}

/// Uniform 1:4 midpoint subdivision until the face count reaches `target_faces`.
///
/// New vertices sit at edge midpoints, so flat faces stay flat. Uvs and colors
/// are interpolated linearly and normals are recomputed.
pub fn subdivide_to(mesh: &TriMesh, target_faces: usize) -> Result<TriMesh, MeshError> {
    let current = mesh.faces.len();
    if target_faces < current {
        return Err(MeshError::TargetBelowCurrent {
            target: target_faces,
            current,
        });
    }
    let rounds = subdivision_rounds(current, target_faces);
    if rounds == 0 {
        return Ok(mesh.clone());
    }
    let mut out = mesh.clone();
    for _ in 0..rounds {
        out = subdivide_once(&out);
    }
    out.compute_normals();
    Ok(out)
}

fn subdivide_once(mesh: &TriMesh) -> TriMesh {
    let mut vertices = mesh.vertices.clone();
    let mut uvs = mesh.uvs.clone();
    let mut colors = mesh.colors.clone();
    let mut midpoints: HashMap<(usize, usize), usize> = HashMap::with_capacity(mesh.faces.len() * 2);
    let mut faces = Vec::with_capacity(mesh.faces.len() * 4);

    let mut midpoint = |a: usize, b: usize| -> usize {
        let key = (a.min(b), a.max(b));
        *midpoints.entry(key).or_insert_with(|| {
            vertices.push(lerp3(vertices[a], vertices[b]));
            if let Some(uvs) = uvs.as_mut() {
                let (ua, ub) = (uvs[a], uvs[b]);
                uvs.push([0.5 * (ua[0] + ub[0]), 0.5 * (ua[1] + ub[1])]);
            }
            if let Some(colors) = colors.as_mut() {
                colors.push(lerp3(colors[a], colors[b]));
            }
            vertices.len() - 1
        })
    };

    for &[a, b, c] in &mesh.faces {
        let ab = midpoint(a, b);
        let bc = midpoint(b, c);
        let ca = midpoint(c, a);
        faces.push([a, ab, ca]);
        faces.push([ab, b, bc]);
        faces.push([ca, bc, c]);
        faces.push([ab, bc, ca]);
    }

    let groups = mesh.groups.as_ref().map(|g| FaceGroups {
        names: g.names.clone(),
        face_group: g.face_group.iter().flat_map(|&id| [id; 4]).collect(),
    });
    let n = vertices.len();
    TriMesh {
        vertices,
        faces,
        normals: vec![[0.0, 0.0, 1.0]; n],
        uvs,
        colors,
        groups,
    }
}

fn lerp3(a: Vec3, b: Vec3) -> Vec3 {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])]
}

pub(crate) fn face_cross(vertices: &[Vec3], face: &[usize; 3]) -> Vec3 {
    let p0 = vertices[face[0]];
    cross(sub(vertices[face[1]], p0), sub(vertices[face[2]], p0))
}

#[inline]
pub(crate) fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub(crate) fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub(crate) fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub(crate) fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}
