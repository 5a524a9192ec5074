use irm_core::problems::fem::hex8_stiffness;
use irm_core::problems::{
    estimate_condition, gen_fem_cube, gen_laplacian3d, load_matrix_market, log_spectrum, random_spd, random_vector,
    read_matrix_market, read_rhs, write_matrix_market, write_rhs, FemCubeSpec, ProblemSpec,
};
use irm_core::{IrmError, SparseSpdMatrix};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

fn dense(a: &SparseSpdMatrix) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.n(), a.n());
    for (i, j, v) in a.triplets() {
        m[(i, j)] = v;
    }
    m
}

fn eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn matrix_market_round_trip(seed in 0u64..1000, n in 1usize..25) {
        let dir = tempfile::tempdir().unwrap();
        let a = random_spd(n, 1e3, seed).unwrap();
        let b = random_vector(n, seed);
        let (pa, pb) = (dir.path().join("a.mtx"), dir.path().join("b.mtx"));
        write_matrix_market(&pa, &a).unwrap();
        write_rhs(&pb, &b).unwrap();
        let (a2, b2) = load_matrix_market(&pa, Some(&pb)).unwrap();
        prop_assert_eq!(a2, a);
        prop_assert_eq!(b2.unwrap(), b);
    }

    #[test]
    fn problem_specs_round_trip(n in 2usize..500, k in 1.0f64..1e12, seed in 0u64..99, ne in 1usize..12) {
        let specs = [
            format!("logdiag:n={n},kappa={k:e}"),
            format!("random:n={n},kappa={k:e},seed={seed}"),
            format!("laplacian3d:{}", ne + 1),
            format!("fem-cube:ne={ne},spring=1e-10"),
        ];
        for s in specs {
            let p: ProblemSpec = s.parse().unwrap();
            prop_assert_eq!(p.to_string().parse::<ProblemSpec>().unwrap(), p);
        }
    }
}

#[test]
fn general_storage_must_be_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.mtx");
    std::fs::write(&p, "%%MatrixMarket matrix coordinate real general\n2 2 4\n1 1 2\n1 2 1\n2 1 0.5\n2 2 2\n").unwrap();
    assert!(matches!(read_matrix_market(&p), Err(IrmError::NotSymmetric { .. })));
    std::fs::write(&p, "%%MatrixMarket matrix coordinate real general\n2 2 4\n1 1 2\n1 2 1\n2 1 1\n2 2 2\n").unwrap();
    let a = read_matrix_market(&p).unwrap();
    assert_eq!(a.get(0, 1), Some(1.0));
    assert_eq!(a.get(1, 0), Some(1.0));
}

#[test]
fn symmetric_storage_expands_lower_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.mtx");
    std::fs::write(&p, "%%MatrixMarket matrix coordinate integer symmetric\n% comment\n3 3 4\n1 1 4\n2 1 -1\n2 2 4\n3 3 4\n").unwrap();
    let a = read_matrix_market(&p).unwrap();
    assert_eq!(a.nnz(), 5);
    assert_eq!(a.get(0, 1), Some(-1.0));
}

#[test]
fn malformed_files_are_format_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.mtx");
    for body in ["", "hello\n", "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 x 2\n"] {
        std::fs::write(&p, body).unwrap();
        assert!(matches!(read_matrix_market(&p), Err(IrmError::Format { .. })), "{body:?}");
    }
    assert!(matches!(read_matrix_market(&dir.path().join("missing.mtx")), Err(IrmError::Io { .. })));
    assert!(read_rhs(&dir.path().join("missing.mtx")).is_err());
}

#[test]
fn mtx_problem_without_rhs_uses_row_sums() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("a.mtx");
    let a = gen_laplacian3d(3).unwrap();
    write_matrix_market(&p, &a).unwrap();
    let spec: ProblemSpec = format!("mtx:{}", p.display()).parse().unwrap();
    let prob = spec.build(42).unwrap();
    assert_eq!(prob.b, a.spmv(&vec![1.0; a.n()]));
}

#[test]
fn laplacian_shape() {
    for g in [2, 3, 5] {
        let a = gen_laplacian3d(g).unwrap();
        assert_eq!(a.n(), g * g * g);
        assert_eq!(a.nnz(), 7 * g * g * g - 6 * g * g);
        assert!(a.diagonal().iter().all(|&d| d == 6.0));
    }
    assert!(gen_laplacian3d(1).is_err());
}

#[test]
fn log_spectrum_endpoints() {
    let s = log_spectrum(500, 1e10);
    assert_eq!(s.len(), 500);
    assert_eq!(s[0], 1.0);
    assert!((s[499] / 1e10 - 1.0).abs() < 1e-12);
    assert!(s.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn random_spd_has_requested_spectrum() {
    let a = random_spd(30, 1e4, 5).unwrap();
    let ev = eigenvalues(dense(&a));
    let kappa = ev[29] / ev[0];
    assert!((kappa / 1e4 - 1.0).abs() < 1e-6, "kappa {kappa}");
    assert_eq!(a, random_spd(30, 1e4, 5).unwrap());
}

#[test]
fn hex8_element_has_six_rigid_modes() {
    let k = hex8_stiffness(0.25, 30e9, 0.2);
    let m = DMatrix::from_row_slice(24, 24, &k);
    assert_eq!(m.clone(), m.transpose());
    let ev = eigenvalues(m);
    let top = ev[23];
    assert!(ev[..6].iter().all(|v| v.abs() <= 1e-10 * top), "{:?}", &ev[..7]);
    assert!(ev[6] > 1e-3 * top);
    // rigid translation in x produces no forces
    let ux: Vec<f64> = (0..24).map(|i| if i % 3 == 0 { 1.0 } else { 0.0 }).collect();
    let f = DMatrix::from_row_slice(24, 24, &k) * nalgebra::DVector::from_vec(ux);
    assert!(f.amax() <= 1e-6 * top);
}

#[test]
fn fem_cube_dimensions_and_load() {
    let spec = FemCubeSpec { elements_per_edge: 10, ..FemCubeSpec::default() };
    assert_eq!(spec.dofs(), 3993);
    let (a, b) = gen_fem_cube(&spec).unwrap();
    assert_eq!(a.n(), 3993);
    assert_eq!(b.len(), 3993);
    let nonzero: Vec<usize> = (0..b.len()).filter(|&i| b[i] != 0.0).collect();
    assert_eq!(nonzero.len(), 1);
    assert_eq!(nonzero[0] % 3, 2);
    assert_eq!(b[nonzero[0]], -1.0);
    assert!(a.spd_probe(4, 1).unwrap() > 0.0);
}

#[test]
fn weak_springs_leave_six_soft_modes() {
    let spec = FemCubeSpec { elements_per_edge: 1, spring_scale: 1e-10, ..FemCubeSpec::default() };
    let (a, _) = gen_fem_cube(&spec).unwrap();
    let ev = eigenvalues(dense(&a));
    let soft = ev.iter().filter(|&&v| v < 1e-6 * ev[23]).count();
    assert_eq!(soft, 6);
    assert!(ev[0] > 0.0);
}

#[test]
fn lanczos_matches_dense_eigenvalues() {
    let a = random_spd(80, 1e5, 3).unwrap();
    let ev = eigenvalues(dense(&a));
    let est = estimate_condition(&a, 80).unwrap();
    assert!((est.lambda_max / ev[79] - 1.0).abs() < 1e-8);
    assert!((est.lambda_min / ev[0] - 1.0).abs() < 1e-6);
    assert!((est.kappa / 1e5 - 1.0).abs() < 1e-5);
    assert!(estimate_condition(&a, 5).is_err());
}

#[test]
fn lanczos_stops_on_invariant_subspace() {
    let a = SparseSpdMatrix::from_diagonal(&[1.0, 1.0, 4.0, 4.0, 4.0]).unwrap();
    let est = estimate_condition(&a, 20).unwrap();
    assert!(est.breakdown);
    assert!((est.kappa - 4.0).abs() < 1e-10);
}

#[test]
fn weak_springs_raise_condition_number() {
    let stiff = FemCubeSpec { elements_per_edge: 2, ..FemCubeSpec::default() };
    let weak = FemCubeSpec { spring_scale: 1e-10, ..stiff };
    let (a1, _) = gen_fem_cube(&stiff).unwrap();
    let (a2, _) = gen_fem_cube(&weak).unwrap();
    let k1 = estimate_condition(&a1, 81).unwrap().kappa;
    let k2 = estimate_condition(&a2, 81).unwrap().kappa;
    assert!(k2 / k1 >= 1e6, "{k1:e} vs {k2:e}");
    // exact check against the dense spectrum
    let ev = eigenvalues(dense(&a2));
    assert!((k2 / (ev[80] / ev[0]) - 1.0).abs() < 1e-3);
}
