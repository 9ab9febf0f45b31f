//! Shared helpers for the integration tests: seeded random operands and
//! small dense oracles implemented independently of the library kernels.

#![allow(dead_code)]

use msso_core::linalg::{C64, DenseMatrix, DenseVector};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_interval(r: &mut ChaCha8Rng) -> f64 {
    r.gen::<f64>() * 2.0 - 1.0
}

pub fn random_real_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| Complex::new(unit_interval(r), 0.0))
}

pub fn random_complex_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| Complex::new(unit_interval(r), unit_interval(r)))
}

pub fn random_real_vector(r: &mut ChaCha8Rng, len: usize) -> DenseVector {
    DenseVector::from_vec((0..len).map(|_| Complex::new(unit_interval(r), 0.0)).collect())
}

pub fn random_complex_vector(r: &mut ChaCha8Rng, len: usize) -> DenseVector {
    DenseVector::from_vec(
        (0..len).map(|_| Complex::new(unit_interval(r), unit_interval(r))).collect(),
    )
}

pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    assert_eq!(a.cols(), b.rows());
    DenseMatrix::from_fn(a.rows(), b.cols(), |i, j| {
        (0..a.cols()).map(|k| a[(i, k)] * b[(k, j)]).sum()
    })
}

pub fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
    let mut worst = 0.0f64;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

pub fn vec_max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Dense complex solve by Gaussian elimination with partial pivoting.
/// Oracle route only; quadratic-cost clarity over performance.
pub fn gauss_solve(a: &DenseMatrix, b: &[C64]) -> Vec<C64> {
    let n = a.rows();
    assert_eq!(a.cols(), n);
    assert_eq!(b.len(), n);
    let mut m: Vec<Vec<C64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| m[i][k].norm().total_cmp(&m[j][k].norm())).unwrap();
        m.swap(k, piv);
        rhs.swap(k, piv);
        let pivot = m[k][k];
        assert!(pivot.norm() > 1e-14, "oracle solve hit a singular pivot");
        for i in (k + 1)..n {
            let f = m[i][k] / pivot;
            for j in k..n {
                let mkj = m[k][j];
                m[i][j] -= f * mkj;
            }
            let rk = rhs[k];
            rhs[i] -= f * rk;
        }
    }
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in (i + 1)..n {
            acc -= m[i][j] * rhs[j];
        }
        rhs[i] = acc / m[i][i];
    }
    rhs
}

/// Least-squares oracle: solves (AᴴA + λI) x = Aᴴ d by Gaussian elimination.
pub fn normal_equation_solve(a: &DenseMatrix, d: &DenseVector, lambda: f64) -> Vec<C64> {
    let n = a.cols();
    let ah = a.conj_transpose();
    let mut gram = matmul(&ah, a);
    for i in 0..n {
        gram[(i, i)] += Complex::new(lambda, 0.0);
    }
    let rhs = ah.matvec(d.as_slice());
    gauss_solve(&gram, &rhs)
}

/// Largest eigenvalue of the Hermitian matrix AᴴA via the classical
/// two-sided Jacobi eigenvalue iteration (independent of the library's
/// one-sided SVD).
pub fn sigma_max_eig_oracle(a: &DenseMatrix) -> f64 {
    let h = matmul(&a.conj_transpose(), a);
    let n = h.rows();
    let mut m: Vec<Vec<C64>> = (0..n).map(|i| h.row(i).to_vec()).collect();
    for _ in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(m[i][j].norm());
            }
        }
        if off < 1e-14 * (0..n).map(|i| m[i][i].norm()).fold(0.0, f64::max).max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p][q];
                if apq.norm() == 0.0 {
                    continue;
                }
                let app = m[p][p].re;
                let aqq = m[q][q].re;
                let phase = apq / apq.norm();
                let theta = (aqq - app) / (2.0 * apq.norm());
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // Rotation acting on rows/columns p and q with the phase folded in.
                let (cp, sp) = (Complex::new(c, 0.0), phase.conj() * s);
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = cp * mpk - sp.conj() * mqk;
                    m[q][k] = cp * mqk + sp * mpk;
                }
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = cp * mkp - sp * mkq;
                    m[k][q] = cp * mkq + sp.conj() * mkp;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i].re).fold(0.0f64, f64::max).max(0.0).sqrt()
}
