//! Linear triangle membrane element on a faceted surface.
//!
//! The geometry of an element is its flat facet extended in the normal direction
//! by the normal field `n^h`, which is either the normalized linear interpolant of
//! the nodal normals or the constant facet normal. The Jacobian at `ζ = 0` has the
//! two facet tangents as its first rows and `n^h` as its third row, so solving
//! `J g = (∂φ/∂ξ, ∂φ/∂η, 0)` yields basis gradients tangential to `n^h`.
//!
//! The element energy is the three-term form
//!
//! ```text
//! t ∫ 2μ ε:ε − 4μ (ε n)·(ε n) + λ₀ (∇·u)(∇·v) dΣ
//! ```
//!
//! with `ε` the symmetrized tangential Jacobian. Since `n·ε·n = 0` for tangential
//! gradients, `ε:ε − 2 (ε n)·(ε n)` equals the in-plane energy `(PεP):(PεP)`.

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};
use crate::geometry::{tangent_projector, Mat3, MaterialModel, Vec3};
use crate::mesh::SurfaceMesh;

pub type ElementStiffness = SMatrix<f64, 9, 9>;
pub type ElementLoad = SVector<f64, 9>;

/// How the normal field is represented inside an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalVariant {
    /// Normalized linear interpolation of the nodal normals.
    #[default]
    Interpolated,
    /// Constant facet normal (flat-facet extension).
    Facet,
}

/// Quadrature on the reference triangle `{ξ ≥ 0, η ≥ 0, ξ + η ≤ 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Order 1: centroid rule. Order 2: three interior points, exact for quadratics.
    pub fn order(order: usize) -> Result<Self> {
        match order {
            1 => Ok(Self {
                points: vec![[1.0 / 3.0, 1.0 / 3.0]],
                weights: vec![0.5],
            }),
            2 => Ok(Self {
                points: vec![[1.0 / 6.0, 1.0 / 6.0], [2.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 2.0 / 3.0]],
                weights: vec![1.0 / 6.0; 3],
            }),
            other => Err(Error::UnsupportedQuadrature(other)),
        }
    }

    /// Composite rule applying `self` on each of the `4^levels` subtriangles of a
    /// uniform refinement of the reference triangle.
    pub fn refined(&self, levels: u32) -> Self {
        let mut rule = self.clone();
        for _ in 0..levels {
            rule = rule.split_once();
        }
        rule
    }

    fn split_once(&self) -> Self {
        // (origin, e1, e2) of the affine maps onto the four children
        let children: [([f64; 2], [f64; 2], [f64; 2]); 4] = [
            ([0.0, 0.0], [0.5, 0.0], [0.0, 0.5]),
            ([0.5, 0.0], [0.5, 0.0], [0.0, 0.5]),
            ([0.0, 0.5], [0.5, 0.0], [0.0, 0.5]),
            ([0.5, 0.5], [-0.5, 0.0], [0.0, -0.5]),
        ];
        let mut points = Vec::with_capacity(4 * self.len());
        let mut weights = Vec::with_capacity(4 * self.len());
        for (o, e1, e2) in children {
            for (p, w) in self.iter() {
                points.push([
                    o[0] + p[0] * e1[0] + p[1] * e2[0],
                    o[1] + p[0] * e1[1] + p[1] * e2[1],
                ]);
                weights.push(0.25 * w);
            }
        }
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; 2], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.iter().map(|([xi, eta], w)| w * f(xi, eta)).sum()
    }
}

pub const REFERENCE_GRADIENTS: [[f64; 2]; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

/// Linear shape function values and their reference gradients at `(ξ, η)`.
pub fn shape_functions(xi: f64, eta: f64) -> ([f64; 3], [[f64; 2]; 3]) {
    ([1.0 - xi - eta, xi, eta], REFERENCE_GRADIENTS)
}

/// Nodal positions and normals of one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub coords: [Vec3; 3],
    pub normals: [Vec3; 3],
}

/// Normal and tangential basis gradients at one point of an element.
#[derive(Debug, Clone, Copy)]
pub struct PointKinematics {
    pub normal: Vec3,
    pub gradients: [Vec3; 3],
}

impl ElementGeometry {
    pub fn new(coords: [Vec3; 3], normals: [Vec3; 3]) -> Self {
        Self { coords, normals }
    }

    pub fn from_mesh(mesh: &SurfaceMesh, triangle: usize) -> Self {
        Self::new(mesh.triangle_coords(triangle), mesh.triangle_normals(triangle))
    }

    pub fn tangents(&self) -> (Vec3, Vec3) {
        let [a, b, c] = self.coords;
        (b - a, c - a)
    }

    /// `|∂x/∂ξ × ∂x/∂η|`, twice the facet area.
    pub fn area_element(&self) -> f64 {
        let (t1, t2) = self.tangents();
        t1.cross(&t2).norm()
    }

    pub fn facet_normal(&self) -> Vec3 {
        let (t1, t2) = self.tangents();
        t1.cross(&t2).normalize()
    }

    pub fn point(&self, xi: f64, eta: f64) -> Vec3 {
        let [a, b, c] = self.coords;
        a * (1.0 - xi - eta) + b * xi + c * eta
    }

    pub fn normal(&self, xi: f64, eta: f64, variant: NormalVariant) -> Result<Vec3> {
        match variant {
            NormalVariant::Facet => Ok(self.facet_normal()),
            NormalVariant::Interpolated => {
                let (phi, _) = shape_functions(xi, eta);
                let n0: Vec3 = (0..3).map(|i| self.normals[i] * phi[i]).sum();
                let norm = n0.norm();
                if norm <= f64::EPSILON {
                    return Err(Error::SingularJacobian { det: 0.0, xi, eta });
                }
                Ok(n0 / norm)
            }
        }
    }

    /// Jacobian at `ζ = 0` with rows `∂x/∂ξ`, `∂x/∂η`, `n^h`.
    pub fn jacobian(&self, xi: f64, eta: f64, variant: NormalVariant) -> Result<Mat3> {
        let (t1, t2) = self.tangents();
        let n = self.normal(xi, eta, variant)?;
        let j = Mat3::from_rows(&[t1.transpose(), t2.transpose(), n.transpose()]);
        let det = j.determinant();
        if det.abs() <= 1e-12 * self.area_element() {
            return Err(Error::SingularJacobian { det, xi, eta });
        }
        Ok(j)
    }

    pub fn kinematics(&self, xi: f64, eta: f64, variant: NormalVariant) -> Result<PointKinematics> {
        let j = self.jacobian(xi, eta, variant)?;
        let (_, ref_grads) = shape_functions(xi, eta);
        let gradients = basis_surface_gradients(&j, &ref_grads).ok_or(Error::SingularJacobian {
            det: j.determinant(),
            xi,
            eta,
        })?;
        Ok(PointKinematics {
            normal: j.row(2).transpose(),
            gradients,
        })
    }
}

/// Solves `J g_i = (∂φ_i/∂ξ, ∂φ_i/∂η, 0)` for each basis function.
pub fn basis_surface_gradients(j: &Mat3, ref_grads: &[[f64; 2]; 3]) -> Option<[Vec3; 3]> {
    let inv = j.try_inverse()?;
    Some(ref_grads.map(|[dxi, deta]| inv * Vec3::new(dxi, deta, 0.0)))
}

/// Tangential Jacobian `Σ_i u_i ⊗ g_i`: row `a`, column `b` holds `∂u_a/∂x^Σ_b`.
pub fn tangential_jacobian(gradients: &[Vec3; 3], u: &[Vec3; 3]) -> Mat3 {
    (0..3).map(|i| u[i] * gradients[i].transpose()).sum()
}

fn sym(m: &Mat3) -> Mat3 {
    0.5 * (m + m.transpose())
}

/// `ε_Σ(u)`, the symmetrized tangential Jacobian.
pub fn surface_strain(gradients: &[Vec3; 3], u: &[Vec3; 3]) -> Mat3 {
    sym(&tangential_jacobian(gradients, u))
}

/// `P ε P`.
pub fn projected_strain(strain: &Mat3, n: &Vec3) -> Mat3 {
    let p = tangent_projector(n);
    p * strain * p
}

/// Strain produced by a unit displacement of dof `3 i + c`, i.e. `sym(e_c ⊗ g_i)`.
pub fn strain_operators(gradients: &[Vec3; 3]) -> [Mat3; 9] {
    std::array::from_fn(|k| {
        let mut e = Vec3::zeros();
        e[k % 3] = 1.0;
        sym(&(e * gradients[k / 3].transpose()))
    })
}

/// `ε_u : ε_v − 2 (ε_u n)·(ε_v n)`.
pub fn membrane_strain_product(eu: &Mat3, ev: &Mat3, n: &Vec3) -> f64 {
    eu.dot(ev) - 2.0 * (eu * n).dot(&(ev * n))
}

pub fn element_stiffness(
    geom: &ElementGeometry,
    material: &MaterialModel,
    quad: &QuadratureRule,
    variant: NormalVariant,
) -> Result<ElementStiffness> {
    let mu = material.mu();
    let lambda = material.membrane_lambda();
    let scale = material.thickness * geom.area_element();
    let mut k = ElementStiffness::zeros();
    for ([xi, eta], w) in quad.iter() {
        let PointKinematics { normal, gradients } = geom.kinematics(xi, eta, variant)?;
        let b = strain_operators(&gradients);
        let bn: [Vec3; 9] = b.map(|e| e * normal);
        let tr: [f64; 9] = b.map(|e| e.trace());
        let factor = w * scale;
        for r in 0..9 {
            for c in r..9 {
                let value = 2.0 * mu * b[r].dot(&b[c]) - 4.0 * mu * bn[r].dot(&bn[c])
                    + lambda * tr[r] * tr[c];
                k[(r, c)] += factor * value;
            }
        }
    }
    for r in 0..9 {
        for c in 0..r {
            k[(r, c)] = k[(c, r)];
        }
    }
    Ok(k)
}

/// Consistent nodal load `∫ f φ_i dΣ`, with `f` evaluated at mapped quadrature points.
pub fn element_load(geom: &ElementGeometry, load: impl Fn(&Vec3) -> Vec3, quad: &QuadratureRule) -> ElementLoad {
    let area = geom.area_element();
    let mut f = ElementLoad::zeros();
    for ([xi, eta], w) in quad.iter() {
        let (phi, _) = shape_functions(xi, eta);
        let value = load(&geom.point(xi, eta));
        for i in 0..3 {
            for c in 0..3 {
                f[3 * i + c] += w * area * phi[i] * value[c];
            }
        }
    }
    f
}

#[derive(Debug, Clone)]
pub struct ElementMatrices {
    pub stiffness: ElementStiffness,
    pub load: ElementLoad,
}

pub fn element_matrices(
    geom: &ElementGeometry,
    material: &MaterialModel,
    load: impl Fn(&Vec3) -> Vec3,
    quad: &QuadratureRule,
    variant: NormalVariant,
) -> Result<ElementMatrices> {
    Ok(ElementMatrices {
        stiffness: element_stiffness(geom, material, quad, variant)?,
        load: element_load(geom, load, quad),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn flat_unit() -> ElementGeometry {
        ElementGeometry::new([Vec3::zeros(), Vec3::x(), Vec3::y()], [Vec3::z(); 3])
    }

    fn random_vec(rng: &mut StdRng) -> Vec3 {
        Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    /// A random non-degenerate triangle with nodal normals tilted from the facet normal.
    fn random_element(rng: &mut StdRng) -> ElementGeometry {
        loop {
            let coords = [random_vec(rng), random_vec(rng), random_vec(rng)];
            let g = ElementGeometry::new(coords, [Vec3::z(); 3]);
            if g.area_element() < 0.1 {
                continue;
            }
            let nt = g.facet_normal();
            let normals = [0; 3].map(|_| (nt + 0.4 * random_vec(rng)).normalize());
            return ElementGeometry::new(coords, normals);
        }
    }

    #[test]
    fn shape_function_values() {
        let (phi, grads) = shape_functions(0.0, 0.0);
        assert_eq!(phi, [1.0, 0.0, 0.0]);
        let (phi, _) = shape_functions(1.0 / 3.0, 1.0 / 3.0);
        for p in phi {
            assert_relative_eq!(p, 1.0 / 3.0, epsilon = 1e-15);
        }
        let (phi, _) = shape_functions(0.2, 0.7);
        assert_relative_eq!(phi.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        let sum = grads.iter().fold([0.0; 2], |a, g| [a[0] + g[0], a[1] + g[1]]);
        assert_eq!(sum, [0.0, 0.0]);
    }

    #[test]
    fn quadrature_rules() {
        let q1 = QuadratureRule::order(1).unwrap();
        let q2 = QuadratureRule::order(2).unwrap();
        assert_relative_eq!(q1.weights.iter().sum::<f64>(), 0.5);
        assert_relative_eq!(q2.weights.iter().sum::<f64>(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(q2.integrate(|x, y| x * y), 1.0 / 24.0, epsilon = 1e-15);
        assert_relative_eq!(q2.integrate(|x, _| x * x), 1.0 / 12.0, epsilon = 1e-15);
        assert_relative_eq!(q1.integrate(|_, _| 3.0), 1.5);
        assert_relative_eq!(q1.integrate(|x, _| x * x), 1.0 / 18.0, epsilon = 1e-15);
        for q in [&q1, &q2] {
            for p in &q.points {
                assert!(p[0] >= 0.0 && p[1] >= 0.0 && p[0] + p[1] <= 1.0);
            }
        }
        assert!(matches!(QuadratureRule::order(3), Err(Error::UnsupportedQuadrature(3))));
    }

    #[test]
    fn refined_rule_converges_on_smooth_integrand() {
        let q = QuadratureRule::order(2).unwrap().refined(3);
        assert_eq!(q.len(), 3 * 64);
        assert_relative_eq!(q.weights.iter().sum::<f64>(), 0.5, epsilon = 1e-14);
        // ∫ x³ over the reference triangle = 1/20
        assert_relative_eq!(q.integrate(|x, _| x.powi(3)), 0.05, epsilon = 1e-4);
        assert_relative_eq!(q.integrate(|x, y| x * y), 1.0 / 24.0, epsilon = 1e-15);
    }

    #[test]
    fn flat_jacobian_is_identity() {
        let g = flat_unit();
        for (xi, eta) in [(0.0, 0.0), (0.2, 0.3), (1.0 / 3.0, 1.0 / 3.0)] {
            for variant in [NormalVariant::Interpolated, NormalVariant::Facet] {
                assert_relative_eq!(g.jacobian(xi, eta, variant).unwrap(), Mat3::identity());
            }
        }
    }

    #[test]
    fn facet_jacobian_is_constant() {
        let mut rng = StdRng::seed_from_u64(1);
        let g = random_element(&mut rng);
        let j0 = g.jacobian(0.1, 0.1, NormalVariant::Facet).unwrap();
        let j1 = g.jacobian(0.6, 0.3, NormalVariant::Facet).unwrap();
        assert_eq!(j0, j1);
    }

    #[test]
    fn flat_jacobian_determinant_is_twice_area() {
        let mut rng = StdRng::seed_from_u64(2);
        for _ in 0..50 {
            let e = random_element(&mut rng);
            let flat = ElementGeometry::new(e.coords, [e.facet_normal(); 3]);
            let det = flat.jacobian(0.3, 0.3, NormalVariant::Interpolated).unwrap().determinant();
            // Heron's formula as an independent area computation.
            let [a, b, c] = e.coords;
            let (la, lb, lc) = ((b - c).norm(), (c - a).norm(), (a - b).norm());
            let s = 0.5 * (la + lb + lc);
            let area = (s * (s - la) * (s - lb) * (s - lc)).sqrt();
            assert_relative_eq!(det.abs(), 2.0 * area, max_relative = 1e-9);
        }
    }

    #[test]
    fn normal_in_facet_plane_is_singular() {
        let g = ElementGeometry::new([Vec3::zeros(), Vec3::x(), Vec3::y()], [Vec3::x(); 3]);
        assert!(matches!(
            g.jacobian(0.3, 0.3, NormalVariant::Interpolated),
            Err(Error::SingularJacobian { .. })
        ));
    }

    #[test]
    fn flat_gradients_are_classical() {
        let k = flat_unit().kinematics(0.25, 0.25, NormalVariant::Interpolated).unwrap();
        assert_relative_eq!(k.gradients[0], Vec3::new(-1.0, -1.0, 0.0), epsilon = 1e-15);
        assert_relative_eq!(k.gradients[1], Vec3::new(1.0, 0.0, 0.0), epsilon = 1e-15);
        assert_relative_eq!(k.gradients[2], Vec3::new(0.0, 1.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn gradients_are_tangential_and_sum_to_zero() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..500 {
            let g = random_element(&mut rng);
            let (xi, eta) = (rng.gen_range(0.0..0.5), rng.gen_range(0.0..0.5));
            let k = g.kinematics(xi, eta, NormalVariant::Interpolated).unwrap();
            let scale = k.gradients.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for gi in &k.gradients {
                assert!(gi.dot(&k.normal).abs() <= 1e-13 * scale);
            }
            assert!(k.gradients.iter().sum::<Vec3>().norm() <= 1e-13 * scale);
        }
    }

    #[test]
    fn flat_strain_matches_worked_example() {
        // u linear in x₁, x₂ on the x₁x₂-plane; the tangential Jacobian only
        // carries derivatives along x₁ and x₂, and ε_Σ has the out-of-plane shear
        // entries ½ ∂u₃/∂x_α while PεP drops them.
        let grad_u = Mat3::new(0.3, -0.2, 0.0, 0.5, 0.7, 0.0, 0.4, -0.6, 0.0);
        let g = flat_unit();
        let u = g.coords.map(|x| grad_u * x);
        let k = g.kinematics(0.2, 0.2, NormalVariant::Interpolated).unwrap();
        let eps = surface_strain(&k.gradients, &u);
        let expected = Mat3::new(
            0.3, 0.5 * (-0.2 + 0.5), 0.5 * 0.4,
            0.5 * (-0.2 + 0.5), 0.7, 0.5 * -0.6,
            0.5 * 0.4, 0.5 * -0.6, 0.0,
        );
        assert_relative_eq!(eps, expected, epsilon = 1e-15);
        let projected = projected_strain(&eps, &k.normal);
        let mut in_plane = expected;
        for i in 0..3 {
            in_plane[(2, i)] = 0.0;
            in_plane[(i, 2)] = 0.0;
        }
        assert_relative_eq!(projected, in_plane, epsilon = 1e-15);
    }

    #[test]
    fn translation_gives_zero_strain() {
        let mut rng = StdRng::seed_from_u64(4);
        let g = random_element(&mut rng);
        let k = g.kinematics(0.3, 0.2, NormalVariant::Interpolated).unwrap();
        let c = random_vec(&mut rng);
        assert!(surface_strain(&k.gradients, &[c; 3]).norm() < 1e-14);
    }

    #[test]
    fn strain_product_matches_double_projection() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..1000 {
            let g = random_element(&mut rng);
            let (xi, eta) = (rng.gen_range(0.0..0.5), rng.gen_range(0.0..0.5));
            let k = g.kinematics(xi, eta, NormalVariant::Interpolated).unwrap();
            let u = [0; 3].map(|_| random_vec(&mut rng));
            let v = [0; 3].map(|_| random_vec(&mut rng));
            let eu = surface_strain(&k.gradients, &u);
            let ev = surface_strain(&k.gradients, &v);
            let direct = projected_strain(&eu, &k.normal).dot(&projected_strain(&ev, &k.normal));
            let three_term = membrane_strain_product(&eu, &ev, &k.normal);
            assert!((direct - three_term).abs() <= 1e-12 * eu.norm() * ev.norm());
        }
    }

    #[test]
    fn load_examples() {
        let quad = QuadratureRule::order(2).unwrap();
        // Unit-area flat element.
        let g = ElementGeometry::new(
            [Vec3::zeros(), Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)],
            [Vec3::z(); 3],
        );
        let f = element_load(&g, |_| Vec3::z(), &quad);
        for i in 0..3 {
            assert_relative_eq!(f[3 * i + 2], 1.0 / 3.0, epsilon = 1e-15);
            assert_eq!(f[3 * i], 0.0);
        }
        assert_eq!(element_load(&g, |_| Vec3::zeros(), &quad), ElementLoad::zeros());
    }

    #[test]
    fn linear_load_is_integrated_exactly() {
        // ∫_T (a + b·x) φ_i dA = A/12 · (2 f_i + f_j + f_k) for linear f, by the
        // classical P1 mass-matrix moments. Evaluated independently of quadrature.
        let g = ElementGeometry::new(
            [Vec3::new(0.1, 0.2, 0.0), Vec3::new(1.3, 0.4, 0.2), Vec3::new(0.4, 1.1, -0.3)],
            [Vec3::z(); 3],
        );
        let a = Vec3::new(0.5, -1.0, 2.0);
        let b = Mat3::new(1.0, 2.0, -1.0, 0.5, 0.0, 3.0, -2.0, 1.0, 0.25);
        let field = |x: &Vec3| a + b * x;
        let f = element_load(&g, field, &QuadratureRule::order(2).unwrap());
        let area = 0.5 * g.area_element();
        let nodal = g.coords.map(|x| field(&x));
        for i in 0..3 {
            let expected = area / 12.0 * (2.0 * nodal[i] + nodal[(i + 1) % 3] + nodal[(i + 2) % 3]);
            for c in 0..3 {
                assert_relative_eq!(f[3 * i + c], expected[c], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn element_stiffness_is_symmetric_psd_with_translation_kernel() {
        let mut rng = StdRng::seed_from_u64(6);
        let mat = MaterialModel::plane_stress(100.0, 0.5, 1e-2).unwrap();
        let quad = QuadratureRule::order(2).unwrap();
        for _ in 0..200 {
            let g = random_element(&mut rng);
            let k = element_stiffness(&g, &mat, &quad, NormalVariant::Interpolated).unwrap();
            assert!((k - k.transpose()).norm() <= 1e-13 * k.norm());
            let eig = k.symmetric_eigenvalues();
            let max = eig.max();
            assert!(eig.min() >= -1e-10 * max);
            for c in 0..3 {
                let mut t = ElementLoad::zeros();
                for i in 0..3 {
                    t[3 * i + c] = 1.0;
                }
                assert!((k * t).norm() <= 1e-12 * k.norm());
            }
        }
    }

    #[test]
    fn flat_in_plane_rotation_has_zero_energy() {
        let mat = MaterialModel::plane_stress(100.0, 0.3, 1e-2).unwrap();
        let g = ElementGeometry::new(
            [Vec3::new(0.1, 0.2, 0.0), Vec3::new(1.3, 0.4, 0.0), Vec3::new(0.4, 1.1, 0.0)],
            [Vec3::z(); 3],
        );
        let k = element_stiffness(&g, &mat, &QuadratureRule::order(2).unwrap(), NormalVariant::Interpolated).unwrap();
        let mut u = ElementLoad::zeros();
        for (i, x) in g.coords.iter().enumerate() {
            let r = Vec3::z().cross(x);
            u.fixed_rows_mut::<3>(3 * i).copy_from(&r);
        }
        let energy = u.dot(&(k * u));
        assert!(energy.abs() <= 1e-12 * k.norm() * u.norm_squared());
    }

    #[test]
    fn variants_agree_on_flat_elements() {
        let mat = MaterialModel::plane_stress(100.0, 0.3, 1e-2).unwrap();
        let quad = QuadratureRule::order(2).unwrap();
        let g = ElementGeometry::new(
            [Vec3::new(0.1, 0.2, 0.5), Vec3::new(1.3, 0.4, 0.5), Vec3::new(0.4, 1.1, 0.5)],
            [Vec3::z(); 3],
        );
        let a = element_stiffness(&g, &mat, &quad, NormalVariant::Interpolated).unwrap();
        let b = element_stiffness(&g, &mat, &quad, NormalVariant::Facet).unwrap();
        assert_eq!(a, b);
    }
}
