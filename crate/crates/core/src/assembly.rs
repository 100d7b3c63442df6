//! Global system assembly and homogeneous Dirichlet constraints in rotated nodal frames.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::element::{element_matrices, shape_functions, ElementGeometry, ElementMatrices, NormalVariant, QuadratureRule};
use crate::error::{Error, Result};
use crate::geometry::{Mat3, MaterialModel, Vec3};
use crate::mesh::{SurfaceMesh, CYLINDER_END_LABEL, CYLINDER_START_LABEL};
use crate::sparse::CsrMatrix;

/// Three displacement components per node, `dof = 3 node + component`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofMap {
    nodes: usize,
}

impl DofMap {
    pub fn new(nodes: usize) -> Self {
        Self { nodes }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn len(&self) -> usize {
        3 * self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.nodes == 0
    }

    #[inline]
    pub fn dof(&self, node: usize, component: usize) -> usize {
        debug_assert!(node < self.nodes && component < 3);
        3 * node + component
    }

    #[inline]
    pub fn node_component(&self, dof: usize) -> (usize, usize) {
        (dof / 3, dof % 3)
    }
}

/// Homogeneous constraint `q · u = 0` at a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint {
    pub node: usize,
    pub direction: Vec3,
}

/// Orthonormal frame of a constrained node.
///
/// The columns of `axes` are the local dof directions; the first `fixed` of them
/// span the constraint directions and are eliminated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodalFrame {
    pub node: usize,
    pub axes: Mat3,
    pub fixed: usize,
}

impl NodalFrame {
    /// Gram–Schmidt on the constraint directions, completed with the coordinate
    /// axis least aligned with the current span (smallest index on ties).
    pub fn from_directions(node: usize, directions: &[Vec3]) -> Result<Self> {
        if directions.len() > 3 {
            return Err(Error::DependentConstraints(node));
        }
        let mut basis: Vec<Vec3> = Vec::with_capacity(3);
        for q in directions {
            let norm = q.norm();
            if norm.is_nan() || norm <= 0.0 {
                return Err(Error::DependentConstraints(node));
            }
            let mut v = q / norm;
            for b in &basis {
                v -= b.dot(&v) * b;
            }
            let residual = v.norm();
            if residual < 1e-8 {
                return Err(Error::DependentConstraints(node));
            }
            basis.push(v / residual);
        }
        let fixed = basis.len();
        while basis.len() < 3 {
            let axis = (0..3)
                .map(|k| (k, basis.iter().map(|b| b[k] * b[k]).sum::<f64>()))
                .fold((0, f64::INFINITY), |best, (k, w)| if w < best.1 { (k, w) } else { best })
                .0;
            let mut v = Vec3::zeros();
            v[axis] = 1.0;
            for b in &basis {
                v -= b.dot(&v) * b;
            }
            basis.push(v.normalize());
        }
        Ok(Self {
            node,
            axes: Mat3::from_columns(&basis),
            fixed,
        })
    }
}

/// Stiffness, load and the nodal frames of any applied constraints.
///
/// Dofs of constrained nodes are expressed in their [`NodalFrame`]; all other dofs
/// are global Cartesian components.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    dofs: DofMap,
    frames: Vec<NodalFrame>,
    constraints: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new(matrix: CsrMatrix, rhs: Vec<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() != rhs.len() || !rhs.len().is_multiple_of(3) {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: rhs.len(),
            });
        }
        Ok(Self {
            dofs: DofMap::new(rhs.len() / 3),
            matrix,
            rhs,
            frames: Vec::new(),
            constraints: Vec::new(),
        })
    }

    pub fn dofs(&self) -> DofMap {
        self.dofs
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn frames(&self) -> &[NodalFrame] {
        &self.frames
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// `true` for every eliminated (local) dof.
    pub fn fixed_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.dim()];
        for f in &self.frames {
            for a in 0..f.fixed {
                mask[self.dofs.dof(f.node, a)] = true;
            }
        }
        mask
    }

    /// Maps local (solver) dofs to global Cartesian displacements.
    pub fn to_global(&self, local: &[f64]) -> Vec<f64> {
        self.rotate(local, false)
    }

    /// Maps global Cartesian displacements to local (solver) dofs.
    pub fn to_local(&self, global: &[f64]) -> Vec<f64> {
        self.rotate(global, true)
    }

    fn rotate(&self, v: &[f64], transpose: bool) -> Vec<f64> {
        let mut out = v.to_vec();
        for f in &self.frames {
            let k = 3 * f.node;
            let block = Vec3::new(v[k], v[k + 1], v[k + 2]);
            let r = if transpose { f.axes.transpose() * block } else { f.axes * block };
            out[k..k + 3].copy_from_slice(r.as_slice());
        }
        out
    }
}

/// Assembles `t a_h(u, v)` and `(f, v)` over all triangles of `mesh`.
///
/// Element matrices are computed in parallel and scattered in triangle order.
pub fn assemble(
    mesh: &SurfaceMesh,
    material: &MaterialModel,
    load: impl Fn(&Vec3) -> Vec3 + Sync,
    quad: &QuadratureRule,
    variant: NormalVariant,
) -> Result<LinearSystem> {
    let dofs = DofMap::new(mesh.num_vertices());
    let elements: Vec<ElementMatrices> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let geom = ElementGeometry::from_mesh(mesh, t);
            element_matrices(&geom, material, &load, quad, variant).map_err(|e| Error::Element {
                element: t,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut triplets = Vec::with_capacity(81 * elements.len());
    let mut rhs = vec![0.0; dofs.len()];
    for (tri, em) in mesh.triangles().iter().zip(&elements) {
        let global: [usize; 9] = std::array::from_fn(|k| dofs.dof(tri[k / 3], k % 3));
        for (r, &gr) in global.iter().enumerate() {
            rhs[gr] += em.load[r];
            for (c, &gc) in global.iter().enumerate() {
                triplets.push((gr, gc, em.stiffness[(r, c)]));
            }
        }
    }
    let matrix = CsrMatrix::from_triplets(dofs.len(), dofs.len(), &triplets)?;
    LinearSystem::new(matrix, rhs)
}

/// Load vector of a uniform pressure `p` acting along the discrete normal `n^h`.
///
/// Used for imported meshes, where no analytic normal field is available.
pub fn pressure_load(mesh: &SurfaceMesh, pressure: f64, quad: &QuadratureRule, variant: NormalVariant) -> Result<Vec<f64>> {
    let per_element: Vec<[Vec3; 3]> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let geom = ElementGeometry::from_mesh(mesh, t);
            let area = geom.area_element();
            let mut f = [Vec3::zeros(); 3];
            for ([xi, eta], w) in quad.iter() {
                let n = geom.normal(xi, eta, variant).map_err(|e| Error::Element {
                    element: t,
                    source: Box::new(e),
                })?;
                let (phi, _) = shape_functions(xi, eta);
                for i in 0..3 {
                    f[i] += (w * area * pressure * phi[i]) * n;
                }
            }
            Ok(f)
        })
        .collect::<Result<_>>()?;
    let mut rhs = vec![0.0; 3 * mesh.num_vertices()];
    for (tri, f) in mesh.triangles().iter().zip(&per_element) {
        for (i, &v) in tri.iter().enumerate() {
            for c in 0..3 {
                rhs[3 * v + c] += f[i][c];
            }
        }
    }
    Ok(rhs)
}

/// Fixes all three components of every vertex on the mesh boundary.
pub fn clamp_boundary(mesh: &SurfaceMesh) -> Vec<Constraint> {
    mesh.boundary_components()
        .iter()
        .flat_map(|c| c.vertices.iter())
        .flat_map(|&node| (0..3).map(move |axis| {
            let mut direction = Vec3::zeros();
            direction[axis] = 1.0;
            Constraint { node, direction }
        }))
        .collect()
}

/// Axial constraints on the `x = 0` loop and radial constraints on the `x = L` loop.
pub fn cylinder_constraints(mesh: &SurfaceMesh) -> Result<Vec<Constraint>> {
    let loop_of = |label: &str| {
        mesh.boundary_component(label)
            .ok_or_else(|| Error::MissingBoundary(label.to_string()))
    };
    let start = loop_of(CYLINDER_START_LABEL)?;
    let end = loop_of(CYLINDER_END_LABEL)?;

    let mut constraints = Vec::with_capacity(start.vertices.len() + end.vertices.len());
    for &node in &start.vertices {
        constraints.push(Constraint {
            node,
            direction: Vec3::x(),
        });
    }
    for &node in &end.vertices {
        let x = mesh.vertices()[node];
        let radial = Vec3::new(0.0, x.y, x.z);
        let norm = radial.norm();
        if norm == 0.0 {
            return Err(Error::InvalidParameter(format!("node {node} lies on the cylinder axis")));
        }
        constraints.push(Constraint {
            node,
            direction: radial / norm,
        });
    }
    Ok(constraints)
}

/// Rotates constrained nodes into their [`NodalFrame`] and eliminates the
/// constrained local dofs (identity row and column, zero right-hand side).
///
/// The remaining local directions carry natural (zero traction) conditions.
pub fn apply_constraints(system: &LinearSystem, constraints: &[Constraint]) -> Result<LinearSystem> {
    if !system.frames.is_empty() {
        return Err(Error::InvalidParameter("system is already constrained".into()));
    }
    if constraints.is_empty() {
        return Ok(system.clone());
    }
    let dofs = system.dofs;
    let mut by_node: BTreeMap<usize, Vec<Vec3>> = BTreeMap::new();
    for c in constraints {
        if c.node >= dofs.nodes() {
            return Err(Error::DimensionMismatch {
                expected: dofs.nodes(),
                actual: c.node,
            });
        }
        by_node.entry(c.node).or_default().push(c.direction);
    }
    let frames = by_node
        .iter()
        .map(|(&node, dirs)| NodalFrame::from_directions(node, dirs))
        .collect::<Result<Vec<_>>>()?;

    let mut frame_of: Vec<Option<&NodalFrame>> = vec![None; dofs.nodes()];
    for f in &frames {
        frame_of[f.node] = Some(f);
    }

    // K' = Tᵀ K T with T = blockdiag(Q_node); unconstrained nodes have Q = I.
    let matrix = &system.matrix;
    let mut triplets = Vec::with_capacity(matrix.nnz());
    for r in 0..matrix.nrows() {
        let (i, p) = dofs.node_component(r);
        let (cols, vals) = matrix.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            let (j, q) = dofs.node_component(c);
            match (frame_of[i], frame_of[j]) {
                (None, None) => triplets.push((r, c, v)),
                (Some(fi), None) => {
                    for a in 0..3 {
                        triplets.push((3 * i + a, c, fi.axes[(p, a)] * v));
                    }
                }
                (None, Some(fj)) => {
                    for b in 0..3 {
                        triplets.push((r, 3 * j + b, v * fj.axes[(q, b)]));
                    }
                }
                (Some(fi), Some(fj)) => {
                    for a in 0..3 {
                        for b in 0..3 {
                            triplets.push((3 * i + a, 3 * j + b, fi.axes[(p, a)] * v * fj.axes[(q, b)]));
                        }
                    }
                }
            }
        }
    }
    let mut rotated = LinearSystem {
        matrix: CsrMatrix::from_triplets(dofs.len(), dofs.len(), &triplets)?,
        rhs: system.rhs.clone(),
        dofs,
        frames,
        constraints: constraints.to_vec(),
    };
    rotated.rhs = rotated.to_local(&system.rhs);

    let fixed = rotated.fixed_mask();
    let mut eliminated = rotated.matrix.clone();
    {
        let row_ptr = rotated.matrix.row_ptr().to_vec();
        let col_idx = rotated.matrix.col_idx().to_vec();
        let values = eliminated.values_mut();
        for r in 0..dofs.len() {
            for k in row_ptr[r]..row_ptr[r + 1] {
                let c = col_idx[k];
                if fixed[r] || fixed[c] {
                    values[k] = if r == c { 1.0 } else { 0.0 };
                }
            }
        }
    }
    for (r, &is_fixed) in fixed.iter().enumerate() {
        if is_fixed {
            rotated.rhs[r] = 0.0;
            debug_assert_eq!(eliminated.get(r, r), 1.0);
        }
    }
    rotated.matrix = eliminated;
    Ok(rotated)
}
