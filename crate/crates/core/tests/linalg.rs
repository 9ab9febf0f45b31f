mod support;

use msso_core::linalg::{
    c, cr, lsqr_damped, lstsq_min_norm, max_singular_value, pinv, C64, DenseMatrix, DenseVector,
    LSQR_TOL, PINV_REL_TOL,
};
use msso_core::Error;
use num_complex::Complex;
use support::*;

fn eye(n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |i, j| if i == j { cr(1.0) } else { cr(0.0) })
}

#[test]
fn oracle_self_checks() {
    // The eigenvalue and elimination oracles must stand on their own feet
    // before they are used to judge the library kernels.
    let a = DenseMatrix::from_vec(2, 2, vec![cr(3.0), cr(0.0), cr(0.0), cr(1.0)]);
    assert!((sigma_max_eig_oracle(&a) - 3.0).abs() < 1e-12);
    let b = DenseMatrix::from_vec(2, 2, vec![cr(0.0), cr(2.0), cr(0.0), cr(0.0)]);
    assert!((sigma_max_eig_oracle(&b) - 2.0).abs() < 1e-12);
    let hermitian_test = DenseMatrix::from_vec(2, 2, vec![cr(1.0), c(0.0, 2.0), cr(0.0), cr(1.0)]);
    // A = [[1, 2i],[0, 1]] has gram [[1, 2i],[-2i, 5]] with eigenvalues 3 ± 2√2.
    let expect = (3.0 + 2.0 * 2.0f64.sqrt()).sqrt();
    assert!((sigma_max_eig_oracle(&hermitian_test) - expect).abs() < 1e-10);

    let m = DenseMatrix::from_vec(2, 2, vec![c(1.0, 1.0), cr(2.0), cr(0.0), c(0.0, -1.0)]);
    let x = gauss_solve(&m, &[c(3.0, 1.0), c(0.0, 2.0)]);
    // Forward-check the solve.
    let back = m.matvec(&x);
    assert!(vec_max_abs_diff(&back, &[c(3.0, 1.0), c(0.0, 2.0)]) < 1e-12);
}

// ── pinv ──

#[test]
fn pinv_identity() {
    let i2 = eye(2);
    let p = pinv(&i2, PINV_REL_TOL).unwrap();
    assert!(max_abs_diff(&p, &i2) < 1e-14);
}

#[test]
fn pinv_rank_deficient_diagonal() {
    let a = DenseMatrix::from_vec(2, 2, vec![cr(2.0), cr(0.0), cr(0.0), cr(0.0)]);
    let p = pinv(&a, PINV_REL_TOL).unwrap();
    let expect = DenseMatrix::from_vec(2, 2, vec![cr(0.5), cr(0.0), cr(0.0), cr(0.0)]);
    assert!(max_abs_diff(&p, &expect) < 1e-14);
}

#[test]
fn pinv_matches_normal_equations_on_full_column_rank() {
    let mut r = rng(11);
    let a = random_real_matrix(&mut r, 4, 2);
    let p = pinv(&a, PINV_REL_TOL).unwrap();
    // Oracle: (AᵀA)⁻¹Aᵀ column by column.
    let ah = a.conj_transpose();
    for j in 0..4 {
        let e = (0..4).map(|i| if i == j { cr(1.0) } else { cr(0.0) }).collect::<Vec<_>>();
        let rhs = ah.matvec(&e);
        let gram = matmul(&ah, &a);
        let col = gauss_solve(&gram, &rhs);
        for i in 0..2 {
            assert!((p[(i, j)] - col[i]).norm() < 1e-9);
        }
    }
}

#[test]
fn pinv_penrose_conditions() {
    for seed in 0..8u64 {
        let mut r = rng(100 + seed);
        let (rows, cols) = ([(5, 3), (3, 5), (4, 4), (6, 2)])[(seed % 4) as usize];
        let a = if seed < 4 {
            random_complex_matrix(&mut r, rows, cols)
        } else {
            random_real_matrix(&mut r, rows, cols)
        };
        let p = pinv(&a, PINV_REL_TOL).unwrap();
        let sigma = max_singular_value(&a).unwrap();
        let tol = 1e-10 * sigma.max(1.0);
        let apa = matmul(&matmul(&a, &p), &a);
        assert!(max_abs_diff(&apa, &a) < tol, "A A+ A = A failed (seed {seed})");
        let pap = matmul(&matmul(&p, &a), &p);
        assert!(max_abs_diff(&pap, &p) < tol, "A+ A A+ = A+ failed (seed {seed})");
        let ap = matmul(&a, &p);
        assert!(max_abs_diff(&ap, &ap.conj_transpose()) < tol, "(A A+)ᴴ failed (seed {seed})");
        let pa = matmul(&p, &a);
        assert!(max_abs_diff(&pa, &pa.conj_transpose()) < tol, "(A+ A)ᴴ failed (seed {seed})");
    }
}

#[test]
fn pinv_rejects_empty_and_bad_tol() {
    let a = DenseMatrix::zeros(0, 3);
    assert!(matches!(pinv(&a, 0.0), Err(Error::EmptyOperand)));
    let b = eye(2);
    assert!(pinv(&b, 1.5).is_err());
}

// ── lsqr_damped ──

#[test]
fn lsqr_identity_ridge() {
    let a = eye(2);
    let d = DenseVector::from_real(&[1.0, 1.0]);
    let q = lsqr_damped(&a, &d, 1.0, LSQR_TOL, 100).unwrap();
    assert!(vec_max_abs_diff(q.as_slice(), &[cr(0.5), cr(0.5)]) < 1e-10);
}

#[test]
fn lsqr_exact_solve_lambda_zero() {
    let a = eye(3);
    let d = DenseVector::from_real(&[0.3, -2.0, 7.5]);
    let q = lsqr_damped(&a, &d, 0.0, LSQR_TOL, 100).unwrap();
    assert!(vec_max_abs_diff(q.as_slice(), d.as_slice()) < 1e-10);
}

#[test]
fn lsqr_matches_normal_equations() {
    let mut r = rng(7);
    let a = random_complex_matrix(&mut r, 6, 4);
    let d = random_complex_vector(&mut r, 6);
    for &lambda in &[0.3, 0.0, 1.0] {
        let q = lsqr_damped(&a, &d, lambda, 1e-12, 4 * 6).unwrap();
        let oracle = normal_equation_solve(&a, &d, lambda);
        assert!(
            vec_max_abs_diff(q.as_slice(), &oracle) < 1e-6,
            "lambda {lambda} disagrees with the dense oracle"
        );
    }
}

#[test]
fn lsqr_objective_never_beats_direct_solve_badly() {
    let mut r = rng(21);
    for trial in 0..10 {
        let a = random_complex_matrix(&mut r, 8, 5);
        let d = random_complex_vector(&mut r, 8);
        let lambda = 0.2 * (trial as f64 + 1.0) / 10.0;
        let q = lsqr_damped(&a, &d, lambda, LSQR_TOL, 4 * 8).unwrap();
        let oracle = normal_equation_solve(&a, &d, lambda);
        let obj = |x: &[C64]| {
            let ax = a.matvec(x);
            let rn: f64 =
                ax.iter().zip(d.as_slice()).map(|(y, t)| (t - y).norm_sqr()).sum::<f64>();
            let xn: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>();
            rn + lambda * xn
        };
        let fq = obj(q.as_slice());
        let fo = obj(&oracle);
        assert!(fq <= fo + LSQR_TOL * (1.0 + fo), "iterative objective exceeded direct solve");
    }
}

#[test]
fn lsqr_rejects_bad_inputs() {
    let a = eye(2);
    let d = DenseVector::from_real(&[1.0, 2.0, 3.0]);
    assert!(matches!(lsqr_damped(&a, &d, 0.0, 1e-10, 10), Err(Error::DimMismatch(_))));
    let d2 = DenseVector::from_real(&[1.0, 2.0]);
    assert!(lsqr_damped(&a, &d2, -1.0, 1e-10, 10).is_err());
}

// ── max_singular_value ──

#[test]
fn sigma_max_diagonal_and_zero() {
    let a = DenseMatrix::from_vec(2, 2, vec![cr(3.0), cr(0.0), cr(0.0), cr(1.0)]);
    assert!((max_singular_value(&a).unwrap() - 3.0).abs() < 1e-10);
    let z = DenseMatrix::zeros(3, 2);
    assert_eq!(max_singular_value(&z).unwrap(), 0.0);
}

#[test]
fn sigma_max_matches_eig_oracle() {
    for seed in 0..6u64 {
        let mut r = rng(300 + seed);
        let a = random_complex_matrix(&mut r, 5, 3);
        let got = max_singular_value(&a).unwrap();
        let expect = sigma_max_eig_oracle(&a);
        assert!(
            (got - expect).abs() < 1e-9 * expect,
            "seed {seed}: {got} vs oracle {expect}"
        );
    }
}

#[test]
fn sigma_max_absolute_homogeneity() {
    let mut r = rng(44);
    let a = random_complex_matrix(&mut r, 4, 4);
    let sa = max_singular_value(&a).unwrap();
    let scaled = DenseMatrix::from_fn(4, 4, |i, j| a[(i, j)] * (-2.5));
    let ss = max_singular_value(&scaled).unwrap();
    assert!((ss - 2.5 * sa).abs() < 1e-10 * ss.max(1.0));
}

// ── lstsq_min_norm ──

#[test]
fn lstsq_matches_pinv_route() {
    for (seed, rows, cols) in [(1u64, 6, 3), (2, 3, 6), (3, 5, 5), (4, 8, 4)] {
        let mut r = rng(500 + seed);
        let a = random_complex_matrix(&mut r, rows, cols);
        let d = random_complex_vector(&mut r, rows);
        let x = lstsq_min_norm(&a, &d).unwrap();
        let p = pinv(&a, PINV_REL_TOL).unwrap();
        let expect = p.matvec(d.as_slice());
        assert!(
            vec_max_abs_diff(x.as_slice(), &expect) < 1e-9,
            "minimum-norm solve disagrees with pinv at {rows}x{cols}"
        );
    }
}

#[test]
fn lstsq_rank_deficient_falls_back_to_min_norm() {
    // Duplicate columns force the QR path to bail out to the SVD route.
    let a = DenseMatrix::from_vec(3, 2, vec![cr(1.0), cr(1.0), cr(2.0), cr(2.0), cr(0.0), cr(0.0)]);
    let d = DenseVector::from_real(&[1.0, 2.0, 3.0]);
    let x = lstsq_min_norm(&a, &d).unwrap();
    let p = pinv(&a, PINV_REL_TOL).unwrap();
    let expect = p.matvec(d.as_slice());
    assert!(vec_max_abs_diff(x.as_slice(), &expect) < 1e-9);
}
