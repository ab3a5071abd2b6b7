//! ASCII Wavefront OBJ reader and writer.
//!
//! Reads `v` (optionally with trailing RGB), `vt`, `vn`, `f` and `g`/`o`
//! records. Every distinct `v/vt/vn` corner becomes one mesh vertex, so a
//! mesh written by [`save_obj`] reads back with the same vertex order.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{FaceGroups, MeshError, TriMesh, Vec3};

pub fn load_obj(path: impl AsRef<Path>) -> Result<TriMesh, MeshError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_obj(&text, path)
}

type Corner = (usize, Option<usize>, Option<usize>);

/// Parses OBJ text. `origin` is only used in error messages.
pub fn parse_obj(text: &str, origin: impl AsRef<Path>) -> Result<TriMesh, MeshError> {
    let origin = origin.as_ref();
    let err = |line: usize, message: String| MeshError::Parse {
        path: PathBuf::from(origin),
        line,
        message,
    };

    let mut positions: Vec<Vec3> = Vec::new();
    let mut colors: Vec<Option<Vec3>> = Vec::new();
    let mut texcoords: Vec<[f64; 2]> = Vec::new();
    let mut normals: Vec<Vec3> = Vec::new();

    let mut corner_index: HashMap<Corner, usize> = HashMap::new();
    let mut corners: Vec<Corner> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();

    let mut group_names: Vec<String> = Vec::new();
    let mut face_group: Vec<u32> = Vec::new();
    let mut current_group: Option<u32> = None;
    let mut saw_group = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let keyword = tokens.next().unwrap_or("");
        let rest: Vec<&str> = tokens.collect();
        match keyword {
            "v" => {
                let nums = parse_floats(&rest).map_err(|m| err(line_no, m))?;
                match nums.len() {
                    3 | 4 => {
                        positions.push([nums[0], nums[1], nums[2]]);
                        colors.push(None);
                    }
                    6 | 7 => {
                        positions.push([nums[0], nums[1], nums[2]]);
                        colors.push(Some([nums[3], nums[4], nums[5]]));
                    }
                    n => return Err(err(line_no, format!("vertex record has {n} components"))),
                }
            }
            "vt" => {
                let nums = parse_floats(&rest).map_err(|m| err(line_no, m))?;
                if nums.len() < 2 {
                    return Err(err(line_no, "texture coordinate needs u and v".into()));
                }
                texcoords.push([nums[0], nums[1]]);
            }
            "vn" => {
                let nums = parse_floats(&rest).map_err(|m| err(line_no, m))?;
                if nums.len() != 3 {
                    return Err(err(line_no, "normal record needs 3 components".into()));
                }
                normals.push([nums[0], nums[1], nums[2]]);
            }
            "f" => {
                if rest.len() < 3 {
                    return Err(err(line_no, "face needs at least 3 vertices".into()));
                }
                let mut polygon = Vec::with_capacity(rest.len());
                for token in &rest {
                    let corner = parse_corner(token, positions.len(), texcoords.len(), normals.len())
                        .map_err(|m| err(line_no, m))?;
                    let next = corners.len();
                    let idx = *corner_index.entry(corner).or_insert_with(|| {
                        corners.push(corner);
                        next
                    });
                    polygon.push(idx);
                }
                for i in 1..polygon.len() - 1 {
                    faces.push([polygon[0], polygon[i], polygon[i + 1]]);
                    face_group.push(current_group.unwrap_or(0));
                }
            }
            "g" | "o" => {
                let name = rest.first().copied().unwrap_or("default");
                if !saw_group && !faces.is_empty() {
                    // faces before the first group record
                    intern(&mut group_names, "default");
                }
                saw_group = true;
                current_group = Some(intern(&mut group_names, name));
            }
            "s" | "usemtl" | "mtllib" | "l" | "p" => {}
            other => log::debug!("{}:{line_no}: ignoring `{other}` record", origin.display()),
        }
    }

    if faces.is_empty() {
        return Err(MeshError::Empty);
    }

    let vertices: Vec<Vec3> = corners.iter().map(|c| positions[c.0]).collect();
    let uvs = if !corners.is_empty() && corners.iter().all(|c| c.1.is_some()) {
        Some(corners.iter().map(|c| texcoords[c.1.unwrap()]).collect())
    } else {
        None
    };
    let vertex_colors = if colors.iter().any(Option::is_some) {
        Some(
            corners
                .iter()
                .map(|c| colors[c.0].unwrap_or([1.0, 1.0, 1.0]))
                .collect(),
        )
    } else {
        None
    };
    let file_normals = corners.iter().all(|c| c.2.is_some());

    let n = vertices.len();
    let mut mesh = TriMesh {
        vertices,
        faces,
        normals: vec![[0.0, 0.0, 1.0]; n],
        uvs,
        colors: vertex_colors,
        groups: saw_group.then_some(FaceGroups {
            names: group_names,
            face_group,
        }),
    };
    let usable_normals = file_normals
        && corners
            .iter()
            .all(|c| super::norm(normals[c.2.unwrap()]) > 1e-12);
    if usable_normals {
        mesh.normals = corners
            .iter()
            .map(|c| {
                let v = normals[c.2.unwrap()];
                super::scale(v, 1.0 / super::norm(v))
            })
            .collect();
    } else {
        mesh.compute_normals();
    }
    mesh.validate()?;
    Ok(mesh)
}

fn intern(names: &mut Vec<String>, name: &str) -> u32 {
    match names.iter().position(|n| n == name) {
        Some(i) => i as u32,
        None => {
            names.push(name.to_string());
            (names.len() - 1) as u32
        }
    }
}

fn parse_floats(tokens: &[&str]) -> Result<Vec<f64>, String> {
    tokens
        .iter()
        .map(|t| {
            let v: f64 = t.parse().map_err(|_| format!("invalid number `{t}`"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("non-finite number `{t}`"))
            }
        })
        .collect()
}

fn resolve(token: &str, count: usize, what: &str) -> Result<usize, String> {
    let raw: i64 = token
        .parse()
        .map_err(|_| format!("invalid {what} index `{token}`"))?;
    let idx = if raw > 0 {
        raw - 1
    } else if raw < 0 {
        count as i64 + raw
    } else {
        return Err(format!("{what} index 0 is invalid"));
    };
    if idx < 0 || idx as usize >= count {
        return Err(format!("{what} index {raw} out of range (have {count})"));
    }
    Ok(idx as usize)
}

fn parse_corner(token: &str, nv: usize, nt: usize, nn: usize) -> Result<Corner, String> {
    let mut parts = token.split('/');
    let v = resolve(parts.next().unwrap_or(""), nv, "vertex")?;
    let vt = match parts.next() {
        Some("") | None => None,
        Some(t) => Some(resolve(t, nt, "texture")?),
    };
    let vn = match parts.next() {
        Some("") | None => None,
        Some(t) => Some(resolve(t, nn, "normal")?),
    };
    Ok((v, vt, vn))
}

/// Serializes a mesh to OBJ text. Floats use the shortest exact representation.
pub fn write_obj(mesh: &TriMesh) -> String {
    let mut out = String::with_capacity(mesh.vertices.len() * 64 + mesh.faces.len() * 24);
    for (i, p) in mesh.vertices.iter().enumerate() {
        match &mesh.colors {
            Some(c) => {
                let c = c[i];
                let _ = writeln!(out, "v {} {} {} {} {} {}", p[0], p[1], p[2], c[0], c[1], c[2]);
            }
            None => {
                let _ = writeln!(out, "v {} {} {}", p[0], p[1], p[2]);
            }
        }
    }
    if let Some(uvs) = &mesh.uvs {
        for uv in uvs {
            let _ = writeln!(out, "vt {} {}", uv[0], uv[1]);
        }
    }
    for n in &mesh.normals {
        let _ = writeln!(out, "vn {} {} {}", n[0], n[1], n[2]);
    }
    let mut current: Option<u32> = None;
    for (f, face) in mesh.faces.iter().enumerate() {
        if let Some(groups) = &mesh.groups {
            let g = groups.face_group[f];
            if current != Some(g) {
                let _ = writeln!(out, "g {}", groups.names[g as usize]);
                current = Some(g);
            }
        }
        out.push('f');
        for &i in face {
            let i = i + 1;
            if mesh.uvs.is_some() {
                let _ = write!(out, " {i}/{i}/{i}");
            } else {
                let _ = write!(out, " {i}//{i}");
            }
        }
        out.push('\n');
    }
    out
}

pub fn save_obj(mesh: &TriMesh, path: impl AsRef<Path>) -> Result<(), MeshError> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(write_obj(mesh).as_bytes())?;
    file.flush()?;
    Ok(())
}
