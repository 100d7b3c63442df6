//! ASCII OFF and OBJ readers for triangle meshes.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{NormalMode, SurfaceMesh};
use crate::error::{Error, Result};
use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "off" => Some(Self::Off),
            "obj" => Some(Self::Obj),
            _ => None,
        }
    }
}

impl FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "off" => Ok(Self::Off),
            "obj" => Ok(Self::Obj),
            other => Err(Error::InvalidParameter(format!("unknown mesh format `{other}`"))),
        }
    }
}

/// Reads a triangle mesh and equips it with area-averaged nodal normals.
pub fn import_mesh(path: &Path, format: MeshFormat) -> Result<SurfaceMesh> {
    let text = std::fs::read_to_string(path)?;
    let (vertices, triangles) = match format {
        MeshFormat::Off => parse_off(&text, path)?,
        MeshFormat::Obj => parse_obj(&text, path)?,
    };
    SurfaceMesh::with_computed_normals(vertices, triangles, NormalMode::Averaged)
}

type Soup = (Vec<Vec3>, Vec<[usize; 3]>);

struct Lines<'a> {
    path: PathBuf,
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str, path: &Path) -> Self {
        Self {
            path: path.to_path_buf(),
            inner: text.lines().enumerate(),
        }
    }

    fn error(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    /// Next non-blank line with comments stripped, with its 1-based number.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                return Some((i + 1, line));
            }
        }
        None
    }
}

fn parse_number<T: FromStr>(lines: &Lines, line: usize, token: Option<&str>, what: &str) -> Result<T> {
    let token = token.ok_or_else(|| lines.error(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| lines.error(line, format!("invalid {what} `{token}`")))
}

pub fn parse_off(text: &str, path: &Path) -> Result<Soup> {
    let mut lines = Lines::new(text, path);
    let (mut line_no, mut line) = lines
        .next_content()
        .ok_or_else(|| lines.error(0, "empty file"))?;

    if let Some(rest) = line.strip_prefix("OFF") {
        let rest = rest.trim();
        if rest.is_empty() {
            (line_no, line) = lines
                .next_content()
                .ok_or_else(|| lines.error(line_no, "missing element counts"))?;
        } else {
            line = rest;
        }
    }
    let mut counts = line.split_whitespace();
    let nv: usize = parse_number(&lines, line_no, counts.next(), "vertex count")?;
    let nf: usize = parse_number(&lines, line_no, counts.next(), "face count")?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, line) = lines
            .next_content()
            .ok_or_else(|| lines.error(line_no, "unexpected end of file in vertex list"))?;
        line_no = n;
        let mut it = line.split_whitespace();
        let mut xyz = [0.0; 3];
        for c in &mut xyz {
            *c = parse_number(&lines, n, it.next(), "coordinate")?;
        }
        vertices.push(Vec3::from(xyz));
    }

    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (n, line) = lines
            .next_content()
            .ok_or_else(|| lines.error(line_no, "unexpected end of file in face list"))?;
        line_no = n;
        let mut it = line.split_whitespace();
        let arity: usize = parse_number(&lines, n, it.next(), "face size")?;
        if arity != 3 {
            return Err(lines.error(n, format!("face with {arity} vertices; only triangles are supported")));
        }
        let mut tri = [0usize; 3];
        for v in &mut tri {
            *v = parse_number(&lines, n, it.next(), "vertex index")?;
        }
        triangles.push(tri);
    }
    Ok((vertices, triangles))
}

pub fn parse_obj(text: &str, path: &Path) -> Result<Soup> {
    let mut lines = Lines::new(text, path);
    let mut vertices = Vec::new();
    let mut faces: Vec<(usize, [i64; 3])> = Vec::new();

    while let Some((n, line)) = lines.next_content() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut xyz = [0.0; 3];
                for c in &mut xyz {
                    *c = parse_number(&lines, n, it.next(), "coordinate")?;
                }
                vertices.push(Vec3::from(xyz));
            }
            Some("f") => {
                let refs: Vec<&str> = it.collect();
                if refs.len() != 3 {
                    return Err(lines.error(
                        n,
                        format!("face with {} vertices; only triangles are supported", refs.len()),
                    ));
                }
                let mut tri = [0i64; 3];
                for (slot, r) in tri.iter_mut().zip(&refs) {
                    *slot = parse_number(&lines, n, r.split('/').next(), "vertex index")?;
                }
                faces.push((n, tri));
            }
            _ => {}
        }
    }
    if vertices.is_empty() && faces.is_empty() {
        return Err(lines.error(0, "empty file"));
    }

    let count = vertices.len() as i64;
    let mut triangles = Vec::with_capacity(faces.len());
    for (n, face) in faces {
        let mut tri = [0usize; 3];
        for (slot, &idx) in tri.iter_mut().zip(&face) {
            let resolved = match idx {
                i if i > 0 && i <= count => i - 1,
                i if i < 0 && -i <= count => count + i,
                i => return Err(lines.error(n, format!("vertex index {i} out of range"))),
            };
            *slot = resolved as usize;
        }
        triangles.push(tri);
    }
    Ok((vertices, triangles))
}
