//! Analytic benchmark surfaces, material parameters and closed-form membrane solutions.
//!
//! Two surfaces are supported:
//!
//! * a cylinder of radius `r` whose axis is the x-axis, with open ends at `x = 0`
//!   and `x = L`;
//! * a torus with major radius `R` and minor radius `r`, symmetric about the z-axis.
//!
//! The torus is parametrized by the toroidal angle `φ` and the poloidal angle `θ`:
//!
//! ```text
//! x = (R + r sin θ) cos φ,   y = (R + r sin θ) sin φ,   z = r cos θ
//! ```
//!
//! so that `R + r sin θ` is the distance to the symmetry axis. `sin θ = +1` on the
//! outer equator and `sin θ = -1` on the inner equator.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Relative distance within which a point counts as lying on an analytic surface.
pub const ON_SURFACE_TOLERANCE: f64 = 1e-8;

const UNIT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticSurface {
    Cylinder { radius: f64, length: f64 },
    Torus { major: f64, minor: f64 },
}

impl AnalyticSurface {
    pub fn cylinder(radius: f64, length: f64) -> Result<Self> {
        if !(radius > 0.0 && length > 0.0) || !radius.is_finite() || !length.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cylinder needs r > 0 and L > 0 (got r = {radius}, L = {length})"
            )));
        }
        Ok(Self::Cylinder { radius, length })
    }

    pub fn torus(major: f64, minor: f64) -> Result<Self> {
        if !(minor > 0.0 && major > minor) || !major.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "torus needs R > r > 0 (got R = {major}, r = {minor})"
            )));
        }
        Ok(Self::Torus { major, minor })
    }

    fn length_scale(&self) -> f64 {
        match *self {
            Self::Cylinder { radius, .. } => radius,
            Self::Torus { major, .. } => major,
        }
    }

    /// Signed distance, positive outside.
    pub fn signed_distance(&self, x: &Vec3) -> Result<f64> {
        match *self {
            Self::Cylinder { radius, .. } => Ok(x.y.hypot(x.z) - radius),
            Self::Torus { major, minor } => {
                let rho = x.x.hypot(x.y);
                if rho <= f64::EPSILON * major {
                    return Err(Error::UndefinedProjection(x.x, x.y, x.z));
                }
                Ok((rho - major).hypot(x.z) - minor)
            }
        }
    }

    /// Outward unit normal of the surface point closest to `x`.
    ///
    /// Unlike [`AnalyticSurface::normal_at`] this accepts points off the surface,
    /// which is what quadrature points on a faceted approximation are.
    pub fn normal_near(&self, x: &Vec3) -> Result<Vec3> {
        let undefined = || Error::UndefinedProjection(x.x, x.y, x.z);
        match *self {
            Self::Cylinder { radius, .. } => {
                let rho = x.y.hypot(x.z);
                if rho <= f64::EPSILON * radius {
                    return Err(undefined());
                }
                Ok(Vec3::new(0.0, x.y / rho, x.z / rho))
            }
            Self::Torus { major, .. } => {
                let angles = TorusAngles::of(x, major).ok_or_else(undefined)?;
                Ok(angles.normal())
            }
        }
    }

    /// Outward unit normal at a point on the surface.
    pub fn normal_at(&self, x: &Vec3) -> Result<Vec3> {
        let distance = self.signed_distance(x)?;
        if distance.abs() > ON_SURFACE_TOLERANCE * self.length_scale() {
            return Err(Error::OffSurface {
                x: x.x,
                y: x.y,
                z: x.z,
                distance,
            });
        }
        self.normal_near(x)
    }

    /// Closest-point projection `x - d(x) n(x)`.
    pub fn closest_point(&self, x: &Vec3) -> Result<Vec3> {
        let n = self.normal_near(x)?;
        Ok(x - self.signed_distance(x)? * n)
    }

    pub fn area(&self) -> f64 {
        match *self {
            Self::Cylinder { radius, length } => 2.0 * PI * radius * length,
            Self::Torus { major, minor } => 4.0 * PI * PI * major * minor,
        }
    }
}

/// Toroidal and poloidal angles of the surface point closest to some point in space.
#[derive(Debug, Clone, Copy)]
struct TorusAngles {
    cos_phi: f64,
    sin_phi: f64,
    cos_theta: f64,
    sin_theta: f64,
}

impl TorusAngles {
    fn of(x: &Vec3, major: f64) -> Option<Self> {
        let rho = x.x.hypot(x.y);
        if rho <= f64::EPSILON * major {
            return None;
        }
        let dr = rho - major;
        let tube = dr.hypot(x.z);
        if tube <= f64::EPSILON * major {
            return None;
        }
        Some(Self {
            cos_phi: x.x / rho,
            sin_phi: x.y / rho,
            cos_theta: x.z / tube,
            sin_theta: dr / tube,
        })
    }

    fn normal(&self) -> Vec3 {
        Vec3::new(
            self.sin_theta * self.cos_phi,
            self.sin_theta * self.sin_phi,
            self.cos_theta,
        )
    }

    /// Unit tangent along the tube centerline.
    fn toroidal(&self) -> Vec3 {
        Vec3::new(-self.sin_phi, self.cos_phi, 0.0)
    }

    /// Unit tangent around the tube cross-section.
    fn poloidal(&self) -> Vec3 {
        Vec3::new(
            self.cos_theta * self.cos_phi,
            self.cos_theta * self.sin_phi,
            -self.sin_theta,
        )
    }
}

/// Orthogonal projector `I - n ⊗ n` onto the tangent plane with unit normal `n`.
pub fn projector(n: &Vec3) -> Result<Mat3> {
    let norm = n.norm();
    if (norm - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NonUnitNormal { index: 0, norm });
    }
    Ok(tangent_projector(n))
}

/// Unchecked form of [`projector`].
#[inline]
pub(crate) fn tangent_projector(n: &Vec3) -> Mat3 {
    Mat3::identity() - n * n.transpose()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstitutiveMode {
    PlaneStress,
    PlaneStrain,
}

/// Isotropic linear elastic membrane material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialModel {
    pub young: f64,
    pub poisson: f64,
    pub thickness: f64,
    pub mode: ConstitutiveMode,
}

impl MaterialModel {
    pub fn new(young: f64, poisson: f64, thickness: f64, mode: ConstitutiveMode) -> Result<Self> {
        if young <= 0.0 || !young.is_finite() {
            return Err(Error::InvalidParameter(format!("E must be positive, got {young}")));
        }
        if thickness <= 0.0 || !thickness.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "thickness must be positive, got {thickness}"
            )));
        }
        let admissible = match mode {
            ConstitutiveMode::PlaneStress => poisson > -1.0 && poisson < 1.0,
            ConstitutiveMode::PlaneStrain => poisson > -1.0 && poisson < 0.5,
        };
        if !admissible {
            return Err(Error::InvalidParameter(format!(
                "Poisson ratio {poisson} is outside the admissible range for {mode:?}"
            )));
        }
        Ok(Self {
            young,
            poisson,
            thickness,
            mode,
        })
    }

    pub fn plane_stress(young: f64, poisson: f64, thickness: f64) -> Result<Self> {
        Self::new(young, poisson, thickness, ConstitutiveMode::PlaneStress)
    }

    /// Shear modulus `E / (2(1 + ν))`.
    pub fn mu(&self) -> f64 {
        self.young / (2.0 * (1.0 + self.poisson))
    }

    /// Lamé's first parameter `Eν / ((1 + ν)(1 - 2ν))`; infinite at `ν = 1/2`.
    pub fn lambda(&self) -> f64 {
        self.young * self.poisson / ((1.0 + self.poisson) * (1.0 - 2.0 * self.poisson))
    }

    /// Plane-stress modulus `2λμ / (λ + 2μ) = Eν / (1 - ν²)`.
    pub fn lambda0(&self) -> f64 {
        self.young * self.poisson / (1.0 - self.poisson * self.poisson)
    }

    /// The dilatational coefficient multiplying `tr ε tr ε` in the membrane energy.
    pub fn membrane_lambda(&self) -> f64 {
        match self.mode {
            ConstitutiveMode::PlaneStress => self.lambda0(),
            ConstitutiveMode::PlaneStrain => self.lambda(),
        }
    }
}

/// Closed-form load and stress fields of a benchmark problem.
///
/// Loads are forces per unit midsurface area. Both fields may be evaluated at
/// points slightly off the surface; they are taken at the closest surface point.
pub trait ExactSolution: Sync {
    fn load_at(&self, x: &Vec3) -> Vec3;
    fn stress_at(&self, x: &Vec3) -> Mat3;
}

/// Cylinder pulled by the axial load `F x / (2π r L²)`.
#[derive(Debug, Clone)]
pub struct CylinderPull {
    pub force: f64,
    pub radius: f64,
    pub length: f64,
    pub thickness: f64,
}

impl CylinderPull {
    pub fn new(force: f64, material: &MaterialModel, surface: &AnalyticSurface) -> Result<Self> {
        match *surface {
            AnalyticSurface::Cylinder { radius, length } => Ok(Self {
                force,
                radius,
                length,
                thickness: material.thickness,
            }),
            AnalyticSurface::Torus { .. } => Err(Error::InvalidParameter(
                "cylinder solution requested on a torus".into(),
            )),
        }
    }

    pub fn axial_stress(&self, x: f64) -> f64 {
        let s = x / self.length;
        self.force * (1.0 - s * s) / (4.0 * PI * self.radius * self.thickness)
    }
}

impl ExactSolution for CylinderPull {
    fn load_at(&self, x: &Vec3) -> Vec3 {
        let f = self.force / (2.0 * PI * self.radius) * x.x / (self.length * self.length);
        Vec3::new(f, 0.0, 0.0)
    }

    fn stress_at(&self, x: &Vec3) -> Mat3 {
        let mut s = Mat3::zeros();
        s[(0, 0)] = self.axial_stress(x.x);
        s
    }
}

/// Torus under internal gauge pressure.
#[derive(Debug, Clone)]
pub struct TorusPressure {
    pub pressure: f64,
    pub major: f64,
    pub minor: f64,
    pub thickness: f64,
}

impl TorusPressure {
    pub fn new(pressure: f64, material: &MaterialModel, surface: &AnalyticSurface) -> Result<Self> {
        match *surface {
            AnalyticSurface::Torus { major, minor } => Ok(Self {
                pressure,
                major,
                minor,
                thickness: material.thickness,
            }),
            AnalyticSurface::Cylinder { .. } => Err(Error::InvalidParameter(
                "torus solution requested on a cylinder".into(),
            )),
        }
    }

    /// Principal stress along the tube centerline.
    pub fn toroidal_stress(&self) -> f64 {
        self.pressure * self.minor / (2.0 * self.thickness)
    }

    /// Principal stress around the tube cross-section.
    pub fn poloidal_stress(&self, sin_theta: f64) -> f64 {
        let (big, r) = (self.major, self.minor);
        self.pressure * r / self.thickness
            * (1.0 - r * sin_theta / (2.0 * (big + r * sin_theta)))
    }

    fn angles(&self, x: &Vec3) -> TorusAngles {
        // Quadrature points never sit on the tube centerline or the symmetry axis.
        TorusAngles::of(x, self.major).unwrap_or(TorusAngles {
            cos_phi: 1.0,
            sin_phi: 0.0,
            cos_theta: 1.0,
            sin_theta: 0.0,
        })
    }
}

impl ExactSolution for TorusPressure {
    fn load_at(&self, x: &Vec3) -> Vec3 {
        self.pressure * self.angles(x).normal()
    }

    fn stress_at(&self, x: &Vec3) -> Mat3 {
        let a = self.angles(x);
        let e1 = a.toroidal();
        let e2 = a.poloidal();
        self.toroidal_stress() * e1 * e1.transpose()
            + self.poloidal_stress(a.sin_theta) * e2 * e2.transpose()
    }
}
