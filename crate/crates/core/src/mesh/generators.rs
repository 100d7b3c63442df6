use std::f64::consts::PI;

use super::SurfaceMesh;
use crate::error::{Error, Result};
use crate::geometry::{AnalyticSurface, Vec3};

pub const CYLINDER_START_LABEL: &str = "x=0";
pub const CYLINDER_END_LABEL: &str = "x=L";

/// Splits every cell of a periodic-in-`a` structured grid into two triangles
/// along the `(a, b) -> (a + 1, b + 1)` diagonal. The `a` direction crossed
/// with the `b` direction must point outward.
fn split_grid(na: usize, nb_cells: usize, periodic_b: bool, id: impl Fn(usize, usize) -> usize) -> Vec<[usize; 3]> {
    let mut triangles = Vec::with_capacity(2 * na * nb_cells);
    for b in 0..nb_cells {
        let b1 = if periodic_b { (b + 1) % nb_cells } else { b + 1 };
        for a in 0..na {
            let a1 = (a + 1) % na;
            let v00 = id(a, b);
            let v10 = id(a1, b);
            let v11 = id(a1, b1);
            let v01 = id(a, b1);
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    triangles
}

/// Cylinder of radius `r` around the x-axis between `x = 0` and `x = L`.
///
/// Vertex `j * n_circ + i` sits at `x = jL / n_axial` and angle `2πi / n_circ`.
/// The two end loops are labeled [`CYLINDER_START_LABEL`] and [`CYLINDER_END_LABEL`];
/// nodal normals are the exact radial directions.
pub fn build_cylinder_mesh(r: f64, length: f64, n_circ: usize, n_axial: usize) -> Result<SurfaceMesh> {
    if n_circ < 3 || n_axial < 1 {
        return Err(Error::InvalidParameter(format!(
            "cylinder mesh needs n_circ >= 3 and n_axial >= 1 (got {n_circ}, {n_axial})"
        )));
    }
    let surface = AnalyticSurface::cylinder(r, length)?;

    let mut vertices = Vec::with_capacity(n_circ * (n_axial + 1));
    for j in 0..=n_axial {
        let x = length * j as f64 / n_axial as f64;
        for i in 0..n_circ {
            let angle = 2.0 * PI * i as f64 / n_circ as f64;
            let (s, c) = angle.sin_cos();
            vertices.push(Vec3::new(x, r * c, r * s));
        }
    }
    let normals = vertices
        .iter()
        .map(|v| surface.normal_at(v))
        .collect::<Result<Vec<_>>>()?;
    let triangles = split_grid(n_circ, n_axial, false, |i, j| j * n_circ + i);

    let mesh = SurfaceMesh::new(vertices, triangles, normals)?;
    let half = 0.5 * length;
    Ok(mesh.relabel_boundary(|_, c| {
        let x = c.vertices[0];
        if mesh_x(x, n_circ, n_axial, length) < half {
            CYLINDER_START_LABEL.to_string()
        } else {
            CYLINDER_END_LABEL.to_string()
        }
    }))
}

fn mesh_x(vertex: usize, n_circ: usize, n_axial: usize, length: f64) -> f64 {
    length * (vertex / n_circ) as f64 / n_axial as f64
}

/// Torus with major radius `R` and minor radius `r`.
///
/// Vertex `k * n_pol + j` sits at toroidal angle `φ = 2πk / n_tor` and poloidal
/// angle `θ = 2πj / n_pol`, using `x = (R + r sin θ) cos φ`, `y = (R + r sin θ) sin φ`,
/// `z = r cos θ`. Nodal normals are exact.
pub fn build_torus_mesh(major: f64, minor: f64, n_tor: usize, n_pol: usize) -> Result<SurfaceMesh> {
    if n_tor < 3 || n_pol < 3 {
        return Err(Error::InvalidParameter(format!(
            "torus mesh needs n_tor >= 3 and n_pol >= 3 (got {n_tor}, {n_pol})"
        )));
    }
    let surface = AnalyticSurface::torus(major, minor)?;

    let mut vertices = Vec::with_capacity(n_tor * n_pol);
    let mut normals = Vec::with_capacity(n_tor * n_pol);
    for k in 0..n_tor {
        let (sp, cp) = (2.0 * PI * k as f64 / n_tor as f64).sin_cos();
        for j in 0..n_pol {
            let (st, ct) = (2.0 * PI * j as f64 / n_pol as f64).sin_cos();
            let rho = major + minor * st;
            vertices.push(Vec3::new(rho * cp, rho * sp, minor * ct));
            normals.push(Vec3::new(st * cp, st * sp, ct));
        }
    }
    debug_assert!(vertices
        .iter()
        .zip(&normals)
        .all(|(x, n)| (surface.normal_at(x).unwrap() - n).norm() < 1e-12));
    // poloidal tangent × toroidal tangent is outward
    let triangles = split_grid(n_pol, n_tor, true, |j, k| k * n_pol + j);
    SurfaceMesh::new(vertices, triangles, normals)
}
