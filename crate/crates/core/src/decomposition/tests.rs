use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fem::{assemble, BoundaryConditions, Elasticity, ElementType, Physics, SparseSystem};
use crate::krylov::LinearOperator;
use crate::materials::{isotropic_stiffness, MaterialTable};
use crate::mesh::{build_layer_cake, decompose, GridSpec, OverlappingDecomposition, StructuredGrid};

struct FixedLeft;

impl BoundaryConditions for FixedLeft {
    fn is_dirichlet(&self, x: &[f64; 3], _c: usize) -> bool {
        x[0] < 1e-9
    }

    fn body_force(&self, _x: &[f64; 3]) -> [f64; 3] {
        [0.0, 0.0, -1.0]
    }
}

struct Setup {
    grid: StructuredGrid,
    physics: Elasticity,
    system: SparseSystem,
    decomp: OverlappingDecomposition,
}

fn elastic_box(cells: [usize; 3], shape: [usize; 3], overlap: usize) -> Setup {
    let grid = build_layer_cake(&GridSpec::box_domain(
        [cells[0] as f64, cells[1] as f64, cells[2] as f64],
        cells,
        ElementType::Hex8,
    ))
    .unwrap();
    let physics = Elasticity {
        materials: MaterialTable::uniform(isotropic_stiffness(1.0, 0.3).unwrap(), 1),
    };
    let system = assemble(&grid, &physics, &FixedLeft).unwrap();
    let decomp = decompose(&grid, shape, overlap).unwrap();
    Setup {
        grid,
        physics,
        system,
        decomp,
    }
}

fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn shape_for(n: usize) -> [usize; 3] {
    match n {
        1 => [1, 1, 1],
        2 => [2, 1, 1],
        4 => [2, 2, 1],
        8 => [2, 2, 2],
        _ => unreachable!(),
    }
}

#[test]
fn pou_is_one_without_decomposition() {
    let s = elastic_box([3, 2, 2], [1, 1, 1], 1);
    let pou = build_pou(&s.decomp, s.grid.n_nodes(), 3).unwrap();
    assert!(pou.weights[0].iter().all(|&x| x == 1.0));
}

#[test]
fn pou_half_on_two_way_overlap() {
    let s = elastic_box([8, 2, 2], [2, 1, 1], 1);
    let pou = build_pou(&s.decomp, s.grid.n_nodes(), 1).unwrap();
    // Node at x = 4 lies strictly inside both extended boxes ([0,5] and [3,8]).
    let n = s.grid.node_at_lattice(4, 1, 1).unwrap();
    for j in 0..2 {
        let l = s.decomp.subdomain_nodes[j].binary_search(&n).unwrap();
        assert_eq!(pou.weights[j][l], 0.5);
    }
    // Nodes on an interior boundary get zero.
    for j in 0..2 {
        for (l, &b) in s.decomp.interior_boundary[j].iter().enumerate() {
            if b {
                assert_eq!(pou.weights[j][l], 0.0);
            }
        }
    }
}

#[test]
fn pou_identity_on_all_tested_decompositions() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in [1, 2, 4, 8] {
        for o in [1, 2] {
            let s = elastic_box([8, 6, 6], shape_for(n), o);
            let pou = build_pou(&s.decomp, s.grid.n_nodes(), 3).unwrap();
            for _ in 0..50 {
                let v = random_vec(s.system.dof_count(), &mut rng);
                let w = pou.apply_sum(&s.decomp, 3, &v);
                let err = v.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(err < 1e-13, "N={n} O={o}: {err}");
            }
            // Weight one on dofs that no other subdomain interior holds.
            let mult = s.decomp.interior_multiplicity(s.grid.n_nodes());
            for (j, nodes) in s.decomp.subdomain_nodes.iter().enumerate() {
                for (l, &node) in nodes.iter().enumerate() {
                    if !s.decomp.interior_boundary[j][l] && mult[node] == 1 {
                        assert_eq!(pou.weights[j][3 * l], 1.0);
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn pou_identity_property(nx in 2usize..7, ny in 1usize..4, nz in 1usize..4, px in 1usize..3, py in 1usize..3, o in 1usize..3, seed in 0u64..1000) {
        prop_assume!(px <= nx && py <= ny);
        let grid = build_layer_cake(&GridSpec::box_domain([1.0; 3], [nx, ny, nz], ElementType::Hex8)).unwrap();
        let decomp = decompose(&grid, [px, py, 1], o).unwrap();
        let pou = build_pou(&decomp, grid.n_nodes(), 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_vec(grid.n_nodes(), &mut rng);
        let w = pou.apply_sum(&decomp, 1, &v);
        for (a, b) in v.iter().zip(&w) {
            prop_assert!((a - b).abs() < 1e-13);
        }
        for w in &pou.weights {
            prop_assert!(w.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
    }
}

fn operators(s: &Setup) -> Vec<SubdomainOperators> {
    let pou = build_pou(&s.decomp, s.grid.n_nodes(), 3).unwrap();
    build_all_subdomain_operators(&s.grid, &s.physics, &s.system, &s.decomp, &pou).unwrap()
}

#[test]
fn single_subdomain_operators_equal_global() {
    let s = elastic_box([3, 2, 2], [1, 1, 1], 1);
    let ops = operators(&s);
    let a = s.system.a.to_dense();
    let op = &ops[0];
    assert!((op.a_submatrix.to_dense() - &a).amax() == 0.0);
    assert!((op.a_dirichlet.to_dense() - &a).amax() == 0.0);
    assert!((op.a_neumann.to_dense() - &a).amax() < 1e-12 * a.amax());
    assert_eq!(op.a_overlap_neumann.to_dense().amax(), 0.0);
}

#[test]
fn four_matrix_consistency() {
    let s = elastic_box([6, 4, 2], [2, 2, 1], 1);
    let ops = operators(&s);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for op in &ops {
        let scale = op.a_submatrix.norm_inf();
        for m in [&op.a_submatrix, &op.a_dirichlet, &op.a_neumann, &op.a_overlap_neumann] {
            assert!(m.max_asymmetry() <= 1e-12 * scale);
        }
        // Dirichlet matrix by an independent dense elimination.
        let mut d = op.a_submatrix.to_dense();
        for (i, &b) in op.interior_boundary.iter().enumerate() {
            if b {
                d.row_mut(i).fill(0.0);
                d.column_mut(i).fill(0.0);
                d[(i, i)] = 1.0;
            }
        }
        assert_eq!((op.a_dirichlet.to_dense() - d).amax(), 0.0);
        assert!(op.a_dirichlet.to_dense().cholesky().is_some());
        // Energy ordering and positive semidefiniteness.
        for _ in 0..20 {
            let v = random_vec(op.dofs.len(), &mut rng);
            let e_full = op.a_neumann.quadratic_form(&v, &v);
            let e_ov = op.a_overlap_neumann.quadratic_form(&v, &v);
            assert!(e_ov >= -1e-12 * scale);
            assert!(e_ov <= e_full + 1e-12 * scale * crate::sparse::dot(&v, &v));
        }
    }
}

#[test]
fn floating_subdomain_neumann_kernel_is_rigid_motions() {
    // Middle subdomain of three along x does not touch the clamped face.
    let s = elastic_box([9, 2, 2], [3, 1, 1], 1);
    let ops = operators(&s);
    let a = ops[1].a_neumann.to_dense();
    let eig = a.symmetric_eigen();
    let max = eig.eigenvalues.amax();
    let kernel = eig.eigenvalues.iter().filter(|&&l| l.abs() < 1e-10 * max).count();
    assert_eq!(kernel, 6);
}

fn one_level(s: &Setup, ops: &[SubdomainOperators]) -> OneLevelSchwarz {
    let maps = Arc::new(DofMaps::new(&s.decomp, s.grid.n_nodes(), 3).unwrap());
    let comm = Arc::new(Communicator::new(s.decomp.neighbors.clone()));
    let mats: Vec<&crate::sparse::CsrMatrix> = ops.iter().map(|o| &o.a_dirichlet).collect();
    OneLevelSchwarz::new(maps, comm, &mats).unwrap()
}

/// `Σ_j R_jᵀ (A_j)_{II}⁻¹ R_j` built from dense blocks of the global matrix.
fn dense_one_level(a: &DMatrix<f64>, ops: &[SubdomainOperators]) -> DMatrix<f64> {
    let n = a.nrows();
    let mut m = DMatrix::zeros(n, n);
    for op in ops {
        let inner: Vec<usize> = op
            .dofs
            .iter()
            .zip(&op.interior_boundary)
            .filter(|(_, &b)| !b)
            .map(|(&g, _)| g)
            .collect();
        let k = inner.len();
        let block = DMatrix::from_fn(k, k, |r, c| a[(inner[r], inner[c])]);
        let inv = block.try_inverse().unwrap();
        for r in 0..k {
            for c in 0..k {
                m[(inner[r], inner[c])] += inv[(r, c)];
            }
        }
    }
    m
}

#[test]
fn one_level_matches_dense_oracle() {
    let s = elastic_box([6, 4, 3], [2, 2, 1], 1);
    let ops = operators(&s);
    let m = one_level(&s, &ops);
    let dense = dense_one_level(&s.system.a.to_dense(), &ops);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let r = random_vec(s.system.dof_count(), &mut rng);
        let y = m.apply_vec(&r);
        let yd = &dense * DVector::from_column_slice(&r);
        let err = y.iter().zip(yd.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-11 * yd.amax(), "{err}");
    }
    assert!(m.apply_vec(&vec![0.0; s.system.dof_count()]).iter().all(|&x| x == 0.0));
}

#[test]
fn one_level_is_symmetric() {
    let s = elastic_box([8, 4, 2], [4, 1, 1], 2);
    let ops = operators(&s);
    let m = one_level(&s, &ops);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let x = random_vec(s.system.dof_count(), &mut rng);
        let y = random_vec(s.system.dof_count(), &mut rng);
        let a = crate::sparse::dot(&m.apply_vec(&x), &y);
        let b = crate::sparse::dot(&x, &m.apply_vec(&y));
        assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()));
    }
}

#[test]
fn single_subdomain_is_exact_solve() {
    let s = elastic_box([4, 2, 2], [1, 1, 1], 1);
    let ops = operators(&s);
    let m = one_level(&s, &ops);
    let x = m.apply_vec(&s.system.b);
    let ax = s.system.a.mul_vec(&x);
    let err = ax
        .iter()
        .zip(&s.system.b)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-10 * s.system.b.iter().fold(0.0f64, |m, v| m.max(v.abs())));
}

#[test]
fn traffic_stays_between_neighbours() {
    let s = elastic_box([8, 4, 4], [2, 2, 2], 1);
    let ops = operators(&s);
    let m = one_level(&s, &ops);
    let _ = m.apply_vec(&s.system.b);
    let ledger = m.communicator().ledger();
    assert!(ledger.total_messages() > 0);
    assert!(ledger.non_neighbor_links(&s.decomp.neighbors).is_empty());
    assert!(ledger.all_gathers.is_empty());
}

#[test]
fn distribute_is_restriction() {
    let s = elastic_box([6, 3, 2], [3, 1, 1], 2);
    let maps = DofMaps::new(&s.decomp, s.grid.n_nodes(), 3).unwrap();
    let comm = Communicator::new(s.decomp.neighbors.clone());
    let v: Vec<f64> = (0..s.system.dof_count()).map(|i| i as f64).collect();
    let local = distribute(&maps, &comm, &v).unwrap();
    for (j, x) in local.iter().enumerate() {
        let expect: Vec<f64> = maps.dofs[j].iter().map(|&g| g as f64).collect();
        assert_eq!(x, &expect);
    }
}

#[test]
fn physics_reports_components() {
    let s = elastic_box([2, 1, 1], [1, 1, 1], 1);
    assert_eq!(s.physics.ncomp(), 3);
}
