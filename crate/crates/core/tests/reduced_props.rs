use irm_core::linalg::{self, dot, energy, CountingOperator};
use irm_core::problems::{random_spd, random_vector};
use irm_core::reduced::{assemble, assemble_from_products, solve, ReducedSystem, SubspaceBasis};
use irm_core::IrmError;
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn setup(n: usize, m: usize, seed: u64) -> (irm_core::SparseSpdMatrix, SubspaceBasis, Vec<f64>) {
    let a = random_spd(n, 1e3, seed).unwrap();
    let vectors = (0..m).map(|k| random_vector(n, seed * 31 + k as u64)).collect();
    (a, SubspaceBasis::new(vectors), random_vector(n, seed + 1000))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn products_path_matches_operator_path(seed in 0u64..500, m in 1usize..5) {
        let (a, basis, r) = setup(20, m, seed);
        let products: Vec<Vec<f64>> = basis.vectors().iter().map(|v| a.spmv(v)).collect();
        prop_assert_eq!(assemble(&a, &basis, &r), assemble_from_products(&basis, &products, &r));
    }

    #[test]
    fn reduced_matrix_is_symmetric(seed in 0u64..500, m in 1usize..6) {
        let (a, basis, r) = setup(25, m, seed);
        let rs = assemble(&a, &basis, &r);
        prop_assert!(rs.asymmetry() <= 1e-12 * rs.max_abs());
        for j in 0..m {
            for k in 0..m {
                prop_assert_eq!(rs.abar(j, k), rs.abar(k, j));
            }
        }
    }

    #[test]
    fn galerkin_residual_is_orthogonal_to_basis(seed in 0u64..500, m in 1usize..5) {
        let (a, basis, r) = setup(30, m, seed);
        let rs = assemble(&a, &basis, &r);
        let sol = solve(&rs, TOL).unwrap();
        let p = linalg::combine(&sol.coeffs, &basis.as_slices());
        let r_new = linalg::sub(&r, &a.spmv(&p));
        for phi in basis.vectors() {
            let scale = linalg::norm2(phi) * linalg::norm2(&r);
            prop_assert!(dot(phi, &r_new).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn minimiser_beats_perturbed_coefficients(seed in 0u64..500, c0 in -1.0f64..1.0, c1 in -1.0f64..1.0) {
        // x = 0 and b = r, so f(Phi a) is the plane energy
        let (a, basis, r) = setup(16, 2, seed);
        let rs = assemble(&a, &basis, &r);
        let sol = solve(&rs, TOL).unwrap();
        let best = energy(&a, &r, &linalg::combine(&sol.coeffs, &basis.as_slices()));
        let other = [sol.coeffs[0] + 1e-3 * c0, sol.coeffs[1] + 1e-3 * c1];
        let worse = energy(&a, &r, &linalg::combine(&other, &basis.as_slices()));
        prop_assert!(worse >= best - 1e-12 * best.abs());
    }

    #[test]
    fn duplicate_vector_is_dropped(seed in 0u64..500, s in 0.1f64..10.0) {
        let (a, basis, r) = setup(20, 2, seed);
        let v = basis.vectors();
        let single = SubspaceBasis::new(vec![v[0].clone(), v[1].clone()]);
        let dup = SubspaceBasis::new(vec![v[0].clone(), linalg::scale(s, &v[0]), v[1].clone()]);
        let s1 = solve(&assemble(&a, &single, &r), TOL).unwrap();
        let s2 = solve(&assemble(&a, &dup, &r), TOL).unwrap();
        prop_assert_eq!(s2.kept.clone(), vec![0, 2]);
        prop_assert_eq!(s2.dropped(), 1);
        let p1 = linalg::combine(&s1.coeffs, &single.as_slices());
        let p2 = linalg::combine(&s2.coeffs, &dup.as_slices());
        prop_assert!(linalg::rel_diff2(&p1, &p2) <= 1e-10);
    }

    #[test]
    fn pivot_test_is_scale_invariant(seed in 0u64..300, e in -12i32..12) {
        let (a, basis, r) = setup(12, 3, seed);
        let s = 10f64.powi(e);
        let v = basis.vectors();
        let scaled = SubspaceBasis::new(vec![v[0].clone(), linalg::scale(s, &v[1]), v[2].clone()]);
        let k1 = solve(&assemble(&a, &basis, &r), TOL).unwrap().kept;
        let k2 = solve(&assemble(&a, &scaled, &r), TOL).unwrap().kept;
        prop_assert_eq!(k1, k2);
    }
}

#[test]
fn gradient_vanishes_at_solution() {
    let rs = ReducedSystem::from_parts(2, vec![4.0, 1.0, 1.0, 3.0], vec![1.0, 2.0]);
    let sol = solve(&rs, TOL).unwrap();
    assert!(rs.gradient(&sol.coeffs).iter().all(|g| g.abs() < 1e-15));
    // 4a + b = 1, a + 3b = 2
    assert!((sol.coeffs[0] - 1.0 / 11.0).abs() < 1e-15);
    assert!((sol.coeffs[1] - 7.0 / 11.0).abs() < 1e-15);
}

#[test]
fn indefinite_reduced_matrix_is_rejected() {
    let rs = ReducedSystem::from_parts(2, vec![1.0, 2.0, 2.0, 1.0], vec![1.0, 1.0]);
    assert!(matches!(solve(&rs, TOL), Err(IrmError::NotPositiveDefinite(_))));
}

#[test]
fn all_zero_basis_with_nonzero_rhs_is_degenerate() {
    let rs = ReducedSystem::from_parts(1, vec![0.0], vec![1.0]);
    assert!(matches!(solve(&rs, TOL), Err(IrmError::DegenerateBasis)));
}

#[test]
fn assemble_counts_one_product_per_vector() {
    let (a, basis, r) = setup(10, 3, 4);
    let op = CountingOperator::new(&a);
    let _ = assemble(&op, &basis, &r);
    assert_eq!(op.count(), 3);
}
