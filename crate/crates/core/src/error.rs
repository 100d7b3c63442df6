use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by mesh construction, element computations, assembly and solves.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("triangle {triangle} references vertex {vertex}, but the mesh has {count} vertices")]
    VertexIndexOutOfRange {
        triangle: usize,
        vertex: usize,
        count: usize,
    },

    #[error("triangle {0} is degenerate (zero area)")]
    DegenerateTriangle(usize),

    #[error("edge ({0}, {1}) is shared by {2} triangles")]
    NonManifoldEdge(usize, usize, usize),

    #[error("vertex {0} is visited by more than one boundary loop segment")]
    NonManifoldVertex(usize),

    #[error("edge ({0}, {1}) is traversed in the same direction by two triangles")]
    InconsistentOrientation(usize, usize),

    #[error("nodal normal {index} has norm {norm}, expected 1")]
    NonUnitNormal { index: usize, norm: f64 },

    #[error("averaged normal at vertex {0} has zero length")]
    ZeroNormal(usize),

    #[error("exact normals require an analytic surface")]
    MissingSurface,

    #[error("point ({x}, {y}, {z}) lies {distance:e} away from the surface")]
    OffSurface {
        x: f64,
        y: f64,
        z: f64,
        distance: f64,
    },

    #[error("closest-point projection is undefined at ({0}, {1}, {2})")]
    UndefinedProjection(f64, f64, f64),

    #[error("singular element Jacobian (det = {det:e}) at ({xi}, {eta})")]
    SingularJacobian { det: f64, xi: f64, eta: f64 },

    #[error("element {element}: {source}")]
    Element {
        element: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("unsupported quadrature order {0}")]
    UnsupportedQuadrature(usize),

    #[error("boundary component `{0}` not found")]
    MissingBoundary(String),

    #[error("constraint directions at node {0} are linearly dependent")]
    DependentConstraints(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("solver did not converge in {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("negative curvature p'Kp = {curvature:e} at iteration {iteration}")]
    NegativeCurvature { iteration: usize, curvature: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("convergence fit: {0}")]
    Fit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
