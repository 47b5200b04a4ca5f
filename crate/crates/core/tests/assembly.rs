use std::sync::Arc;

use mhfe::femcore::{
    assemble_gradient_load, assemble_load, assemble_mass_full, assemble_stiffness_full,
    l2_norm_squared, Constant, Difference, FemMatrices, NodalField, P1Field, P1Gradient,
    Polynomial,
};
use mhfe::oracle::{dense_fem_matrices, dense_mode_system, element_matrices, DenseParams};
use mhfe::systems::{build_mode_system_i, build_mode_system_ii, Problem};
use mhfe::{Error, Mesh};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

#[test]
fn mesh_counts() {
    for n in [1, 2, 5, 16] {
        let m = Mesh::build(n).unwrap();
        assert_eq!(m.num_nodes(), (n + 1) * (n + 1));
        assert_eq!(m.num_triangles(), 2 * n * n);
        assert_eq!(m.num_edges(), 3 * n * n + 2 * n);
        assert_eq!(m.num_dofs(), (n - 1) * (n - 1));
        let total: f64 = (0..m.num_triangles()).map(|t| m.area(t)).sum();
        assert!(close(total, 1.0, 1e-14));
    }
    assert_eq!(Mesh::build(0).unwrap_err(), Error::EmptyMesh);
}

#[test]
fn edge_signs_point_outward() {
    let m = Mesh::build(4).unwrap();
    for t in 0..m.num_triangles() {
        let v = m.vertices(t);
        let c = [
            (v[0][0] + v[1][0] + v[2][0]) / 3.0,
            (v[0][1] + v[1][1] + v[2][1]) / 3.0,
        ];
        for l in 0..3 {
            let e = m.edge_of(t, l);
            let [a, _] = m.edges()[e].nodes;
            let (_, nrm) = m.edge_geometry(e);
            let x = m.nodes()[a];
            let outward = nrm[0] * (x[0] - c[0]) + nrm[1] * (x[1] - c[1]);
            assert_eq!(outward.signum(), m.edge_sign(t, l));
        }
    }
}

#[test]
fn element_matrix_identities() {
    let h = 0.125;
    let (kl, ku, m) = element_matrices(h);
    for ke in [kl, ku] {
        for row in ke {
            assert!(row.iter().sum::<f64>().abs() < 1e-15);
        }
    }
    let msum: f64 = m.iter().flatten().sum();
    assert!(close(msum, h * h / 2.0, 1e-15));
}

#[test]
fn single_interior_node() {
    let mesh = Mesh::build(2).unwrap();
    let mats = FemMatrices::assemble(&mesh, 1.0, 1.0);
    assert_eq!(mats.stiffness.get(0, 0), 4.0);
    assert!(close(mats.mass.get(0, 0), 0.125, 1e-15));
}

#[test]
fn sparse_assembly_matches_dense_oracle() {
    for n in 2..=8 {
        let mesh = Mesh::build(n).unwrap();
        let mats = FemMatrices::assemble(&mesh, 1.0, 1.0);
        let (k, m) = dense_fem_matrices(n);
        let kd = mats.stiffness.to_dense();
        let md = mats.mass.to_dense();
        for i in 0..k.len() {
            for j in 0..k.len() {
                assert!((kd[i][j] - k[i][j]).abs() < 1e-13, "K n={n} ({i},{j})");
                assert!((md[i][j] - m[i][j]).abs() < 1e-13, "M n={n} ({i},{j})");
            }
        }
        assert!(mats.stiffness.same_pattern(&mats.mass));
        assert_eq!(mats.stiffness.symmetry_defect(), 0.0);
    }
}

#[test]
fn full_matrices_reproduce_area_and_kernel() {
    let mesh = Mesh::build(6).unwrap();
    let m = assemble_mass_full(&mesh, 1.0);
    let k = assemble_stiffness_full(&mesh, 1.0);
    let ones = vec![1.0; mesh.num_nodes()];
    assert!(close(m.bilinear(&ones, &ones), 1.0, 1e-13));
    let mut y = vec![0.0; mesh.num_nodes()];
    k.matvec(&ones, &mut y);
    assert!(y.iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn mode_systems_match_dense_oracle() {
    for n in [2, 3, 5, 8] {
        let mesh = Mesh::build(n).unwrap();
        let mats = Arc::new(FemMatrices::assemble(&mesh, 1.0, 1.0));
        let (k, m) = dense_fem_matrices(n);
        let lc = assemble_load(&mesh, |x| x[0] * (1.0 - x[1]));
        let ls = assemble_load(&mesh, |x| x[1]);
        for problem in [Problem::I, Problem::II] {
            for kk in [0usize, 1, 3] {
                let (lambda, omega) = (0.1, 1.3);
                let ls_opt = (kk > 0).then_some(&ls);
                let sys = match problem {
                    Problem::I => build_mode_system_i(mats.clone(), kk, lambda, omega, &lc, ls_opt),
                    Problem::II => {
                        build_mode_system_ii(mats.clone(), kk, lambda, omega, &lc, ls_opt)
                    }
                }
                .unwrap();
                let p = DenseParams {
                    problem,
                    k: kk,
                    lambda,
                    omega,
                    nu: 1.0,
                    sigma: 1.0,
                };
                let dense = dense_mode_system(p, &k, &m, lc.values(), ls_opt.map(|f| f.values()));
                let a = sys.assemble().to_dense();
                assert_eq!(a.len(), dense.matrix.len());
                for i in 0..a.len() {
                    for j in 0..a.len() {
                        assert!((a[i][j] - dense.matrix[i][j]).abs() < 1e-13);
                    }
                }
                assert_eq!(sys.rhs(), &dense.rhs[..]);
                // matrix-free apply agrees with the assembled matrix
                let x: Vec<f64> = (0..sys.dim()).map(|i| (i as f64 * 0.37).sin()).collect();
                let mut y1 = vec![0.0; sys.dim()];
                let mut y2 = vec![0.0; sys.dim()];
                sys.apply(&x, &mut y1);
                sys.assemble().matvec(&x, &mut y2);
                for (a, b) in y1.iter().zip(&y2) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn loads_integrate_exactly() {
    let mesh = Mesh::build(4).unwrap();
    // ∫ φ_i summed over all nodes (incl. boundary) is the area
    let full = mhfe::femcore::assemble_load_full(&mesh, |_| 1.0);
    assert!(close(full.iter().sum::<f64>(), 1.0, 1e-14));
    // ∫ ∇u·∇φ_i for u = x(1−x) equals ∫ 2 φ_i at interior nodes
    let g = assemble_gradient_load(&mesh, |_, x| [1.0 - 2.0 * x[0], 0.0]);
    let f = assemble_load(&mesh, |_| 2.0);
    for (a, b) in g.values().iter().zip(f.values()) {
        assert!(close(*a, *b, 1e-13));
    }
}

#[test]
fn nodal_field_checks_length() {
    let mesh = Mesh::build(3).unwrap();
    let err = NodalField::new(&mesh, vec![0.0; 3]).unwrap_err();
    assert_eq!(
        err,
        Error::Dimension {
            expected: 4,
            got: 3
        }
    );
}

#[test]
fn piecewise_norms() {
    let mesh = Mesh::build(8).unwrap();
    let full: Vec<f64> = mesh.nodes().iter().map(|x| x[0] + 2.0 * x[1]).collect();
    let f = P1Field {
        mesh: &mesh,
        full: &full,
    };
    // ∫ (x + 2y)² = 1/3 + 1 + 4/3
    assert!(close(l2_norm_squared(&mesh, &f).unwrap(), 8.0 / 3.0, 1e-13));
    let g = P1Gradient {
        mesh: &mesh,
        full: &full,
    };
    assert!(close(l2_norm_squared(&mesh, &g).unwrap(), 5.0, 1e-13));
    let d = Difference {
        a: &f,
        b: &Constant(1.0),
    };
    assert!(close(
        l2_norm_squared(&mesh, &d).unwrap(),
        8.0 / 3.0 - 3.0 + 1.0,
        1e-13
    ));
    let cubic = Polynomial {
        degree: 3,
        f: |x: [f64; 2]| x[0].powi(3),
    };
    assert_eq!(
        l2_norm_squared(&mesh, &cubic).unwrap_err(),
        Error::UnsupportedDegree(3)
    );
}

#[test]
fn single_precision_assembly() {
    let mesh = mhfe::mesh::UniformMesh::<f32>::build(4).unwrap();
    let mats = FemMatrices::<f32>::assemble(&mesh, 1.0, 1.0);
    let m64 = FemMatrices::assemble(&Mesh::build(4).unwrap(), 1.0, 1.0);
    for (a, b) in mats.stiffness.values().iter().zip(m64.stiffness.values()) {
        assert!((*a as f64 - b).abs() < 1e-5);
    }
}
