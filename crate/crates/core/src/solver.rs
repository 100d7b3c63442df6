//! Jacobi-preconditioned conjugate gradients for symmetric positive semidefinite systems.
//!
//! Closed membranes are singular: rigid translations are exact zero-energy modes
//! and rigid rotations are near-zero modes. With deflation the right-hand side is
//! projected orthogonal to the translations and every iterate is kept orthogonal
//! to them, so CG runs on the range of the operator.

use std::fmt;

use crate::assembly::LinearSystem;
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::sparse::{dot, norm, CsrMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative residual `‖Ku − b‖ / ‖b‖` to reach.
    pub tol: f64,
    /// Defaults to `50 √n`.
    pub max_iter: Option<usize>,
    pub deflate_translations: bool,
    /// Adds `ε · max diag(K)` to the diagonal. Diagnostic only.
    pub tikhonov: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: None,
            deflate_translations: false,
            tikhonov: None,
        }
    }
}

impl SolverOptions {
    pub fn max_iterations(&self, n: usize) -> usize {
        self.max_iter
            .unwrap_or_else(|| (50.0 * (n as f64).sqrt()).ceil() as usize)
            .max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// `‖Ku − b‖ / ‖b‖`, recomputed from scratch at exit, against the (projected) rhs.
    pub relative_residual: f64,
    pub deflated_dimension: usize,
    /// Norm of the rhs component removed by deflation, relative to `‖b‖`.
    pub removed_load: f64,
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "iterations = {}, relative residual = {:.3e}, deflated modes = {}, removed load fraction = {:.3e}",
            self.iterations, self.relative_residual, self.deflated_dimension, self.removed_load
        )
    }
}

/// Orthonormalizes `vectors` (modified Gram–Schmidt), dropping numerically dependent ones.
pub fn orthonormalize(vectors: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        let original = norm(&v);
        for b in &basis {
            let c = dot(b, &v);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let n = norm(&v);
        if n > 1e-10 * original && n > 0.0 {
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v);
        }
    }
    basis
}

fn project_out(basis: &[Vec<f64>], v: &mut [f64]) {
    for b in basis {
        let c = dot(b, v);
        v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
    }
}

/// Preconditioned CG on `A x = b` restricted to the orthogonal complement of `deflation`.
///
/// `deflation` must be orthonormal and (numerically) in the kernel of `A`.
pub fn conjugate_gradient(
    matrix: &CsrMatrix,
    rhs: &[f64],
    initial_guess: Option<&[f64]>,
    options: &SolverOptions,
    deflation: &[Vec<f64>],
) -> Result<(Vec<f64>, SolveReport)> {
    let n = rhs.len();
    if matrix.nrows() != n || matrix.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: matrix.nrows(),
            actual: n,
        });
    }
    if let Some(x0) = initial_guess {
        if x0.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: x0.len(),
            });
        }
    }
    let max_iter = options.max_iterations(n);

    let diag = matrix.diagonal();
    let shift = options
        .tikhonov
        .map_or(0.0, |eps| eps * diag.iter().fold(0.0f64, |m, d| m.max(d.abs())));
    let inv_diag: Vec<f64> = diag
        .iter()
        .map(|&d| if d + shift > 0.0 { 1.0 / (d + shift) } else { 1.0 })
        .collect();
    let apply = |x: &[f64], y: &mut [f64]| {
        matrix.mul_vec_into(x, y);
        if shift != 0.0 {
            y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += shift * xi);
        }
    };

    let b_norm_full = norm(rhs);
    let mut b = rhs.to_vec();
    project_out(deflation, &mut b);
    let b_norm = norm(&b);
    let removed_load = if b_norm_full > 0.0 {
        let diff: Vec<f64> = rhs.iter().zip(&b).map(|(x, y)| x - y).collect();
        norm(&diff) / b_norm_full
    } else {
        0.0
    };
    let mut report = SolveReport {
        iterations: 0,
        relative_residual: 0.0,
        deflated_dimension: deflation.len(),
        removed_load,
    };
    if b_norm == 0.0 {
        return Ok((vec![0.0; n], report));
    }

    let mut x = initial_guess.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    project_out(deflation, &mut x);

    let mut ap = vec![0.0; n];
    let true_residual = |x: &[f64], ap: &mut [f64]| -> Vec<f64> {
        apply(x, ap);
        let mut r: Vec<f64> = b.iter().zip(ap.iter()).map(|(bi, ai)| bi - ai).collect();
        project_out(deflation, &mut r);
        r
    };
    let precondition = |r: &[f64]| -> Vec<f64> {
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
        project_out(deflation, &mut z);
        z
    };

    let mut r = true_residual(&x, &mut ap);
    let mut iterations = 0;
    loop {
        // (re)start
        let mut z = precondition(&r);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut rel = norm(&r) / b_norm;
        while rel > options.tol && iterations < max_iter {
            apply(&p, &mut ap);
            let curvature = dot(&p, &ap);
            if curvature.is_nan() || curvature <= 0.0 {
                return Err(Error::NegativeCurvature {
                    iteration: iterations,
                    curvature,
                });
            }
            let alpha = rz / curvature;
            x.iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
            r.iter_mut().zip(&ap).for_each(|(ri, ai)| *ri -= alpha * ai);
            project_out(deflation, &mut x);
            project_out(deflation, &mut r);
            iterations += 1;

            z = precondition(&r);
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
            rel = norm(&r) / b_norm;
        }

        r = true_residual(&x, &mut ap);
        let actual = norm(&r) / b_norm;
        report.iterations = iterations;
        report.relative_residual = actual;
        if actual <= options.tol {
            return Ok((x, report));
        }
        if iterations >= max_iter {
            return Err(Error::NotConverged {
                iterations,
                residual: actual,
            });
        }
    }
}

/// The three global translations expressed in the local dofs of `system`,
/// with eliminated dofs zeroed, orthonormalized.
pub fn translation_basis(system: &LinearSystem) -> Vec<Vec<f64>> {
    let fixed = system.fixed_mask();
    let nodes = system.dofs().nodes();
    let vectors = (0..3)
        .map(|c| {
            let mut global = vec![0.0; 3 * nodes];
            for i in 0..nodes {
                global[3 * i + c] = 1.0;
            }
            let mut local = system.to_local(&global);
            local.iter_mut().zip(&fixed).for_each(|(v, &f)| {
                if f {
                    *v = 0.0
                }
            });
            local
        })
        .collect();
    orthonormalize(vectors)
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// Global Cartesian nodal displacements, `3 node + component`.
    pub displacement: Vec<f64>,
    pub report: SolveReport,
}

/// Solves a (possibly constrained) system and returns global displacements.
///
/// `initial_guess` is in global Cartesian components.
pub fn solve(system: &LinearSystem, options: &SolverOptions, initial_guess: Option<&[f64]>) -> Result<Solution> {
    let deflation = if options.deflate_translations {
        translation_basis(system)
    } else {
        Vec::new()
    };
    let fixed = system.fixed_mask();
    let x0 = initial_guess.map(|g| {
        let mut local = system.to_local(g);
        local.iter_mut().zip(&fixed).for_each(|(v, &f)| {
            if f {
                *v = 0.0
            }
        });
        local
    });
    let (local, report) = conjugate_gradient(&system.matrix, &system.rhs, x0.as_deref(), options, &deflation)?;
    Ok(Solution {
        displacement: system.to_global(&local),
        report,
    })
}

/// Fraction of `u` (in the Euclidean norm) lying in the span of the three
/// infinitesimal rigid rotations about the centroid of `vertices`.
pub fn rotation_fraction(vertices: &[Vec3], u: &[f64]) -> f64 {
    let total = norm(u);
    if total == 0.0 || vertices.is_empty() {
        return 0.0;
    }
    let centroid = vertices.iter().sum::<Vec3>() / vertices.len() as f64;
    let rotations = (0..3)
        .map(|axis| {
            let mut w = Vec3::zeros();
            w[axis] = 1.0;
            vertices
                .iter()
                .flat_map(|x| {
                    let v = w.cross(&(x - centroid));
                    [v.x, v.y, v.z]
                })
                .collect()
        })
        .collect();
    let basis = orthonormalize(rotations);
    basis.iter().map(|b| dot(b, u).powi(2)).sum::<f64>().sqrt() / total
}
