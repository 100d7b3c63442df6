//! Finite elements for the linear membrane shell on triangulated surfaces.
//!
//! The membrane problem is posed intrinsically: displacements are 3D vectors on
//! the surface and all derivatives are tangential (projected) gradients. Linear
//! triangles on a faceted surface carry an interpolated normal field, and the
//! in-plane strain energy is evaluated through the symmetrized tangential Jacobian.
//!
//! Typical flow: build a [`mesh::SurfaceMesh`], [`assembly::assemble`] the
//! system, apply [`assembly::apply_constraints`], [`solver::solve`], then
//! [`postprocess::recover_stress`].

pub mod assembly;
pub mod element;
pub mod error;
pub mod geometry;
pub mod mesh;
pub mod postprocess;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
