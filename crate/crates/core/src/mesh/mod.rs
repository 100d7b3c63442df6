//! Triangulated surfaces with nodal normals and boundary topology.

mod generators;
mod io;
mod topology;

pub use generators::{build_cylinder_mesh, build_torus_mesh, CYLINDER_END_LABEL, CYLINDER_START_LABEL};
pub use io::{import_mesh, parse_obj, parse_off, MeshFormat};
pub use topology::boundary_components;

use crate::error::{Error, Result};
use crate::geometry::{AnalyticSurface, Vec3};

const NORMAL_TOLERANCE: f64 = 1e-12;

/// Closed loop of boundary vertices.
///
/// The loop follows the orientation of the adjacent triangles and does not repeat
/// its first vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryComponent {
    pub vertices: Vec<usize>,
    pub label: String,
}

/// Conforming, consistently oriented triangle mesh of a surface.
///
/// A constructed mesh is immutable; operations that change normals or labels
/// return a new mesh.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    normals: Vec<Vec3>,
    boundary: Vec<BoundaryComponent>,
}

#[derive(Debug, Clone, Copy)]
pub enum NormalMode<'a> {
    /// Evaluate the normal of an analytic surface at every vertex.
    Exact(&'a AnalyticSurface),
    /// Area-weighted average of incident facet normals.
    Averaged,
}

impl SurfaceMesh {
    /// Validates the mesh and extracts its boundary loops.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>, normals: Vec<Vec3>) -> Result<Self> {
        if normals.len() != vertices.len() {
            return Err(Error::DimensionMismatch {
                expected: vertices.len(),
                actual: normals.len(),
            });
        }
        check_normals(&normals)?;
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= vertices.len() {
                    return Err(Error::VertexIndexOutOfRange {
                        triangle: t,
                        vertex: v,
                        count: vertices.len(),
                    });
                }
            }
            let [a, b, c] = tri.map(|i| vertices[i]);
            let e1 = b - a;
            let e2 = c - a;
            let scale = e1.norm_squared().max(e2.norm_squared());
            if e1.cross(&e2).norm() <= 1e-14 * scale || scale == 0.0 {
                return Err(Error::DegenerateTriangle(t));
            }
        }
        let boundary = boundary_components(&triangles)?;
        Ok(Self {
            vertices,
            triangles,
            normals,
            boundary,
        })
    }

    /// Builds a mesh whose nodal normals are computed with `mode`.
    pub fn with_computed_normals(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>, mode: NormalMode) -> Result<Self> {
        let placeholder = vec![Vec3::z(); vertices.len()];
        let mesh = Self::new(vertices, triangles, placeholder)?;
        mesh.compute_nodal_normals(mode)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn nodal_normals(&self) -> &[Vec3] {
        &self.normals
    }

    pub fn boundary_components(&self) -> &[BoundaryComponent] {
        &self.boundary
    }

    pub fn boundary_component(&self, label: &str) -> Option<&BoundaryComponent> {
        self.boundary.iter().find(|c| c.label == label)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_coords(&self, t: usize) -> [Vec3; 3] {
        self.triangles[t].map(|i| self.vertices[i])
    }

    pub fn triangle_normals(&self, t: usize) -> [Vec3; 3] {
        self.triangles[t].map(|i| self.normals[i])
    }

    /// Number of distinct undirected edges.
    pub fn num_edges(&self) -> usize {
        let interior = self.triangles.len() * 3;
        let boundary: usize = self.boundary.iter().map(|c| c.vertices.len()).sum();
        (interior + boundary) / 2
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_triangles() as i64
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let [a, b, c] = self.triangle_coords(t);
                0.5 * (b - a).cross(&(c - a)).norm()
            })
            .sum()
    }

    /// Maximum edge length.
    pub fn mesh_size(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
            .map(|(i, j)| (self.vertices[i] - self.vertices[j]).norm())
            .fold(0.0, f64::max)
    }

    /// Returns a copy with nodal normals recomputed according to `mode`.
    pub fn compute_nodal_normals(&self, mode: NormalMode) -> Result<Self> {
        let normals = match mode {
            NormalMode::Exact(surface) => self
                .vertices
                .iter()
                .map(|x| surface.normal_at(x))
                .collect::<Result<Vec<_>>>()?,
            NormalMode::Averaged => self.averaged_normals()?,
        };
        Ok(Self {
            normals,
            ..self.clone()
        })
    }

    fn averaged_normals(&self) -> Result<Vec<Vec3>> {
        let mut acc = vec![Vec3::zeros(); self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            let [a, b, c] = self.triangle_coords(t);
            // |e1 × e2| = 2·area, so the cross product is already area weighted.
            let weighted = (b - a).cross(&(c - a));
            for &v in tri {
                acc[v] += weighted;
            }
        }
        acc.into_iter()
            .enumerate()
            .map(|(v, n)| {
                let norm = n.norm();
                if norm <= f64::MIN_POSITIVE {
                    Err(Error::ZeroNormal(v))
                } else {
                    Ok(n / norm)
                }
            })
            .collect()
    }

    /// Returns a copy with boundary components relabeled by `label_of(index, component)`.
    pub fn relabel_boundary(mut self, mut label_of: impl FnMut(usize, &BoundaryComponent) -> String) -> Self {
        for (i, c) in self.boundary.iter_mut().enumerate() {
            c.label = label_of(i, c);
        }
        self
    }
}

fn check_normals(normals: &[Vec3]) -> Result<()> {
    for (index, n) in normals.iter().enumerate() {
        let norm = n.norm();
        if (norm - 1.0).abs() > NORMAL_TOLERANCE || !norm.is_finite() {
            return Err(Error::NonUnitNormal { index, norm });
        }
    }
    Ok(())
}
