//! Stress recovery, L2 stress errors, convergence-rate fits and file export.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::element::{projected_strain, surface_strain, ElementGeometry, NormalVariant, QuadratureRule};
use crate::error::{Error, Result};
use crate::geometry::{tangent_projector, ExactSolution, Mat3, MaterialModel, Vec3};
use crate::mesh::SurfaceMesh;

/// In-plane stress at one quadrature point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressSample {
    pub element: usize,
    pub position: Vec3,
    /// Quadrature weight times the surface measure.
    pub weight: f64,
    pub normal: Vec3,
    pub stress: Mat3,
}

/// Quadrature-point stresses, grouped by element in element order.
#[derive(Debug, Clone, Default)]
pub struct StressField {
    pub samples: Vec<StressSample>,
}

impl StressField {
    /// Integration-weighted average stress of every element.
    pub fn element_averages(&self, num_elements: usize) -> Vec<Mat3> {
        let mut sums = vec![Mat3::zeros(); num_elements];
        let mut weights = vec![0.0; num_elements];
        for s in &self.samples {
            sums[s.element] += s.weight * s.stress;
            weights[s.element] += s.weight;
        }
        sums.into_iter()
            .zip(weights)
            .map(|(s, w)| if w > 0.0 { s / w } else { s })
            .collect()
    }

    /// Largest `|σ n| / |σ|_F` over all samples with nonzero stress.
    pub fn max_out_of_plane_ratio(&self) -> f64 {
        self.samples
            .iter()
            .filter(|s| s.stress.norm() > 0.0)
            .map(|s| (s.stress * s.normal).norm() / s.stress.norm())
            .fold(0.0, f64::max)
    }

    /// `(∫ |σ|²_F)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.samples.iter().map(|s| s.weight * s.stress.norm_squared()).sum::<f64>().sqrt()
    }
}

/// In-plane stress `2μ PεP + λ₀ tr(PεP) P` for a tangential strain `ε` and normal `n`.
pub fn membrane_stress(strain: &Mat3, n: &Vec3, material: &MaterialModel) -> Mat3 {
    let p = tangent_projector(n);
    let ep = projected_strain(strain, n);
    2.0 * material.mu() * ep + material.membrane_lambda() * ep.trace() * p
}

/// Evaluates `σ^P(u_h)` at every quadrature point of every element.
pub fn recover_stress(
    mesh: &SurfaceMesh,
    material: &MaterialModel,
    displacement: &[f64],
    quad: &QuadratureRule,
    variant: NormalVariant,
) -> Result<StressField> {
    let expected = 3 * mesh.num_vertices();
    if displacement.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: displacement.len(),
        });
    }
    let per_element: Vec<Vec<StressSample>> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let geom = ElementGeometry::from_mesh(mesh, t);
            let u = mesh.triangles()[t].map(|v| {
                Vec3::new(displacement[3 * v], displacement[3 * v + 1], displacement[3 * v + 2])
            });
            let area = geom.area_element();
            quad.iter()
                .map(|([xi, eta], w)| {
                    let k = geom.kinematics(xi, eta, variant).map_err(|e| Error::Element {
                        element: t,
                        source: Box::new(e),
                    })?;
                    let strain = surface_strain(&k.gradients, &u);
                    Ok(StressSample {
                        element: t,
                        position: geom.point(xi, eta),
                        weight: w * area,
                        normal: k.normal,
                        stress: membrane_stress(&strain, &k.normal, material),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(StressField {
        samples: per_element.into_iter().flatten().collect(),
    })
}

/// `‖σ − σ_h‖_{L2(Σ_h)}` with the Frobenius norm pointwise.
pub fn stress_l2_error(field: &StressField, exact: &dyn ExactSolution) -> f64 {
    field
        .samples
        .iter()
        .map(|s| s.weight * (exact.stress_at(&s.position) - s.stress).norm_squared())
        .sum::<f64>()
        .sqrt()
}

/// Least-squares fit of `log(error)` against `log(h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
}

impl ConvergenceRecord {
    /// Observed rates between consecutive samples; `None` for the first row.
    pub fn pairwise_rates(&self) -> Vec<Option<f64>> {
        std::iter::once(None)
            .chain(self.samples.windows(2).map(|w| Some((w[1].1 / w[0].1).ln() / (w[1].0 / w[0].0).ln())))
            .collect()
    }

    pub fn errors_decreasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].1 < w[0].1)
    }

    /// CSV with columns `h,error,rate`; the rate column is empty on the first row.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "h,error,rate")?;
        for ((h, e), rate) in self.samples.iter().zip(self.pairwise_rates()) {
            match rate {
                Some(r) => writeln!(out, "{h:.12e},{e:.12e},{r:.6}")?,
                None => writeln!(out, "{h:.12e},{e:.12e},")?,
            }
        }
        Ok(())
    }
}

pub fn convergence_rate(samples: &[(f64, f64)]) -> Result<ConvergenceRecord> {
    if samples.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 samples, got {}", samples.len())));
    }
    if let Some(&(h, e)) = samples.iter().find(|(h, e)| !(*h > 0.0 && *e > 0.0)) {
        return Err(Error::Fit(format!("mesh size and error must be positive (h = {h}, error = {e})")));
    }
    if samples.windows(2).any(|w| w[1].0 >= w[0].0) {
        return Err(Error::Fit("mesh sizes must be strictly decreasing".into()));
    }
    let n = samples.len() as f64;
    let logs: Vec<(f64, f64)> = samples.iter().map(|&(h, e)| (h.ln(), e.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(ConvergenceRecord {
        samples: samples.to_vec(),
        slope,
        residual,
    })
}

pub fn von_mises(s: &Mat3) -> f64 {
    let (xx, yy, zz) = (s[(0, 0)], s[(1, 1)], s[(2, 2)]);
    let (xy, yz, xz) = (s[(0, 1)], s[(1, 2)], s[(0, 2)]);
    (0.5 * ((xx - yy).powi(2) + (yy - zz).powi(2) + (zz - xx).powi(2)) + 3.0 * (xy * xy + yz * yz + xz * xz)).sqrt()
}

/// Writes a legacy ASCII VTK unstructured grid with nodal displacements and
/// element-averaged stresses (components xx, yy, zz, xy, yz, xz) plus von Mises.
pub fn export_vtk(mesh: &SurfaceMesh, displacement: &[f64], field: &StressField, path: &Path) -> Result<()> {
    let expected = 3 * mesh.num_vertices();
    if displacement.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: displacement.len(),
        });
    }
    let mut out = BufWriter::new(File::create(path)?);
    write_vtk(mesh, displacement, field, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_vtk(mesh: &SurfaceMesh, displacement: &[f64], field: &StressField, out: &mut impl Write) -> Result<()> {
    let nv = mesh.num_vertices();
    let nt = mesh.num_triangles();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "membrane shell solution")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {nv} double")?;
    for x in mesh.vertices() {
        writeln!(out, "{:.12e} {:.12e} {:.12e}", x.x, x.y, x.z)?;
    }
    writeln!(out, "CELLS {nt} {}", 4 * nt)?;
    for [a, b, c] in mesh.triangles() {
        writeln!(out, "3 {a} {b} {c}")?;
    }
    writeln!(out, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(out, "5")?;
    }

    writeln!(out, "POINT_DATA {nv}")?;
    writeln!(out, "VECTORS displacement double")?;
    for u in displacement.chunks_exact(3) {
        writeln!(out, "{:.12e} {:.12e} {:.12e}", u[0], u[1], u[2])?;
    }

    let stresses = field.element_averages(nt);
    writeln!(out, "CELL_DATA {nt}")?;
    writeln!(out, "SCALARS von_mises double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for s in &stresses {
        writeln!(out, "{:.12e}", von_mises(s))?;
    }
    writeln!(out, "FIELD stress_components 1")?;
    writeln!(out, "stress 6 {nt} double")?;
    for s in &stresses {
        writeln!(
            out,
            "{:.12e} {:.12e} {:.12e} {:.12e} {:.12e} {:.12e}",
            s[(0, 0)],
            s[(1, 1)],
            s[(2, 2)],
            s[(0, 1)],
            s[(1, 2)],
            s[(0, 2)]
        )?;
    }
    Ok(())
}
