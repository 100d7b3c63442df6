//! Planar meshes checked against the classical constant-strain triangle and
//! against a dense reassembly.

use membrane_core::assembly::assemble;
use membrane_core::element::{element_stiffness, ElementGeometry, NormalVariant, QuadratureRule};
use membrane_core::geometry::{Mat3, MaterialModel, Vec3};
use membrane_core::mesh::{build_cylinder_mesh, NormalMode, SurfaceMesh};
use membrane_core::postprocess::recover_stress;
use nalgebra::{Rotation3, Unit};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Jittered `n × n` grid in the `z = 0` plane.
fn planar_points(n: usize, rng: &mut StdRng) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let h = 1.0 / n as f64;
    let mut pts = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            let interior = i > 0 && i < n && j > 0 && j < n;
            let (dx, dy) = if interior {
                (rng.gen_range(-0.2..0.2) * h, rng.gen_range(-0.2..0.2) * h)
            } else {
                (0.0, 0.0)
            };
            pts.push(Vec3::new(i as f64 * h + dx, 0.7 * j as f64 * h + dy, 0.0));
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut tris = Vec::new();
    for j in 0..n {
        for i in 0..n {
            tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    (pts, tris)
}

/// Textbook plane-stress CST stiffness `t A Bᵀ D B` on in-plane dofs `(u_x, u_y)`.
fn cst_stiffness(p: [[f64; 2]; 3], young: f64, nu: f64, t: f64) -> [[f64; 6]; 6] {
    let [[x1, y1], [x2, y2], [x3, y3]] = p;
    let two_a = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1);
    let area = 0.5 * two_a;
    let b = [y2 - y3, y3 - y1, y1 - y2];
    let c = [x3 - x2, x1 - x3, x2 - x1];
    let mut bm = [[0.0; 6]; 3];
    for i in 0..3 {
        bm[0][2 * i] = b[i] / two_a;
        bm[1][2 * i + 1] = c[i] / two_a;
        bm[2][2 * i] = c[i] / two_a;
        bm[2][2 * i + 1] = b[i] / two_a;
    }
    let s = young / (1.0 - nu * nu);
    let d = [[s, s * nu, 0.0], [s * nu, s, 0.0], [0.0, 0.0, s * (1.0 - nu) / 2.0]];
    let mut k = [[0.0; 6]; 6];
    for r in 0..6 {
        for q in 0..6 {
            let mut v = 0.0;
            for a in 0..3 {
                for e in 0..3 {
                    v += bm[a][r] * d[a][e] * bm[e][q];
                }
            }
            k[r][q] = t * area * v;
        }
    }
    k
}

/// CST stiffness assembled densely and embedded in 3D with the plane rotated by `rot`.
fn cst_global(pts: &[Vec3], tris: &[[usize; 3]], young: f64, nu: f64, t: f64, rot: &Mat3) -> Vec<Vec<f64>> {
    let n = 3 * pts.len();
    let mut planar = vec![vec![0.0; n]; n];
    for tri in tris {
        let p = tri.map(|v| [pts[v].x, pts[v].y]);
        let ke = cst_stiffness(p, young, nu, t);
        for a in 0..3 {
            for b in 0..3 {
                for (ca, cb) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    planar[3 * tri[a] + ca][3 * tri[b] + cb] += ke[2 * a + ca][2 * b + cb];
                }
            }
        }
    }
    // K_rot = T K Tᵀ with T = blockdiag(rot).
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            let block = Mat3::from_fn(|a, b| planar[3 * i + a][3 * j + b]);
            let rotated = rot * block * rot.transpose();
            for a in 0..3 {
                for b in 0..3 {
                    out[3 * i + a][3 * j + b] = rotated[(a, b)];
                }
            }
        }
    }
    out
}

fn max_abs(m: &[Vec<f64>]) -> f64 {
    m.iter().flatten().fold(0.0, |a, v| a.max(v.abs()))
}

fn check_against_cst(rot: Mat3, nu: f64, seed: u64) {
    let (young, t) = (100.0, 1e-2);
    let mut rng = StdRng::seed_from_u64(seed);
    let (pts, tris) = planar_points(4, &mut rng);
    let rotated: Vec<Vec3> = pts.iter().map(|p| rot * p).collect();
    let normal = rot * Vec3::z();
    let mesh = SurfaceMesh::new(rotated, tris.clone(), vec![normal; pts.len()]).unwrap();
    let mat = MaterialModel::plane_stress(young, nu, t).unwrap();
    let quad = QuadratureRule::order(2).unwrap();
    let oracle = cst_global(&pts, &tris, young, nu, t, &rot);
    let scale = max_abs(&oracle);
    for variant in [NormalVariant::Interpolated, NormalVariant::Facet] {
        let system = assemble(&mesh, &mat, |_| Vec3::zeros(), &quad, variant).unwrap();
        let dense = system.matrix.to_dense();
        for (r, row) in dense.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                assert!(
                    (v - oracle[r][c]).abs() <= 1e-10 * scale,
                    "entry ({r}, {c}): {v} vs {}",
                    oracle[r][c]
                );
            }
        }
    }
}

#[test]
fn planar_stiffness_matches_cst_in_xy_plane() {
    check_against_cst(Mat3::identity(), 0.5, 1);
    check_against_cst(Mat3::identity(), 0.3, 2);
    check_against_cst(Mat3::identity(), 0.0, 3);
}

#[test]
fn planar_stiffness_matches_cst_in_rotated_planes() {
    let mut rng = StdRng::seed_from_u64(11);
    for seed in 0..5 {
        let axis = Unit::new_normalize(Vec3::new(rng.gen(), rng.gen(), rng.gen::<f64>() - 0.5));
        let rot = *Rotation3::from_axis_angle(&axis, rng.gen_range(0.1..3.0)).matrix();
        check_against_cst(rot, 0.5, 100 + seed);
    }
}

#[test]
fn sparse_assembly_matches_dense_scatter() {
    let mesh = build_cylinder_mesh(1.0, 4.0, 6, 5).unwrap();
    assert!(mesh.num_vertices() <= 50);
    let mat = MaterialModel::plane_stress(100.0, 0.5, 1e-2).unwrap();
    let quad = QuadratureRule::order(2).unwrap();
    let variant = NormalVariant::Interpolated;
    let system = assemble(&mesh, &mat, |_| Vec3::zeros(), &quad, variant).unwrap();

    let n = 3 * mesh.num_vertices();
    let mut dense = vec![vec![0.0; n]; n];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let ke = element_stiffness(&ElementGeometry::from_mesh(&mesh, t), &mat, &quad, variant).unwrap();
        for r in 0..9 {
            for c in 0..9 {
                dense[3 * tri[r / 3] + r % 3][3 * tri[c / 3] + c % 3] += ke[(r, c)];
            }
        }
    }
    let scale = max_abs(&dense);
    let sparse = system.matrix.to_dense();
    for r in 0..n {
        for c in 0..n {
            assert!((sparse[r][c] - dense[r][c]).abs() <= 1e-13 * scale);
        }
    }
    assert!(system.matrix.asymmetry() <= 1e-14);
}

#[test]
fn planar_in_plane_rotation_is_energy_free() {
    let mut rng = StdRng::seed_from_u64(5);
    let (pts, tris) = planar_points(6, &mut rng);
    let mesh = SurfaceMesh::with_computed_normals(pts, tris, NormalMode::Averaged).unwrap();
    let mat = MaterialModel::plane_stress(100.0, 0.5, 1e-2).unwrap();
    let system = assemble(&mesh, &mat, |_| Vec3::zeros(), &QuadratureRule::order(2).unwrap(), NormalVariant::Interpolated)
        .unwrap();
    let u: Vec<f64> = mesh
        .vertices()
        .iter()
        .flat_map(|x| {
            let v = Vec3::z().cross(&(x - Vec3::new(0.5, 0.3, 0.0)));
            [v.x, v.y, v.z]
        })
        .collect();
    let max_diag = system.matrix.diagonal().into_iter().fold(0.0, f64::max);
    let uu: f64 = u.iter().map(|v| v * v).sum();
    assert!(system.matrix.quadratic_form(&u) <= 1e-10 * max_diag * uu);
}

fn stresses_on(mesh: &SurfaceMesh, u: &[f64]) -> Vec<Mat3> {
    let mat = MaterialModel::plane_stress(100.0, 0.3, 1e-2).unwrap();
    recover_stress(mesh, &mat, u, &QuadratureRule::order(2).unwrap(), NormalVariant::Interpolated)
        .unwrap()
        .samples
        .into_iter()
        .map(|s| s.stress)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stress_is_objective_on_planar_meshes(
        seed in 0u64..1000,
        axis in prop::array::uniform3(-1.0f64..1.0),
        angle in 0.0f64..std::f64::consts::TAU,
    ) {
        prop_assume!(Vec3::from(axis).norm() > 0.1);
        let rot = *Rotation3::from_axis_angle(&Unit::new_normalize(Vec3::from(axis)), angle).matrix();
        let mut rng = StdRng::seed_from_u64(seed);
        let (pts, tris) = planar_points(3, &mut rng);
        let u: Vec<Vec3> = pts.iter().map(|_| Vec3::new(rng.gen(), rng.gen(), rng.gen())).collect();
        let flat: Vec<f64> = u.iter().flat_map(|v| [v.x, v.y, v.z]).collect();

        let base = SurfaceMesh::new(pts.clone(), tris.clone(), vec![Vec3::z(); pts.len()]).unwrap();
        let turned = SurfaceMesh::new(
            pts.iter().map(|p| rot * p).collect(),
            tris,
            vec![rot * Vec3::z(); pts.len()],
        ).unwrap();
        let turned_u: Vec<f64> = u.iter().flat_map(|v| { let w = rot * v; [w.x, w.y, w.z] }).collect();

        for (s0, s1) in stresses_on(&base, &flat).iter().zip(stresses_on(&turned, &turned_u)) {
            let expected = rot * s0 * rot.transpose();
            prop_assert!((s1 - expected).norm() <= 1e-10 * (1.0 + s0.norm()));
        }
    }
}
