//! Modified Gram-Schmidt with reorthogonalization. Backs the QR least-squares
//! fast path and the incremental projection bases used by the greedy pursuits.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex;

use super::dense::{axpy, dot_h, vec_norm2, C64, DenseMatrix, DenseVector};

/// A column is treated as dependent when orthogonalization shrinks it below
/// this fraction of its original norm.
pub(crate) const DEPENDENT_COL_TOL: f64 = 1e-10;

/// Growable set of orthonormal columns of length `m`.
#[derive(Clone)]
pub(crate) struct OrthoBasis {
    m: usize,
    cols: Vec<Vec<C64>>,
}

impl OrthoBasis {
    pub fn new(m: usize) -> Self {
        OrthoBasis { m, cols: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn cols(&self) -> &[Vec<C64>] {
        &self.cols
    }

    /// Subtracts the projection of `v` onto the basis, twice for stability.
    pub fn deflate(&self, v: &mut [C64]) {
        for _ in 0..2 {
            for q in &self.cols {
                let coef = dot_h(q, v);
                axpy(-coef, q, v);
            }
        }
    }

    /// Deflates and, when the remainder is independent, appends it normalized.
    /// Returns whether the column was kept.
    pub fn push(&mut self, col: &[C64]) -> bool {
        debug_assert_eq!(col.len(), self.m);
        let orig = vec_norm2(col);
        let mut v = col.to_vec();
        self.deflate(&mut v);
        let nrm = vec_norm2(&v);
        if nrm <= DEPENDENT_COL_TOL * orig || nrm == 0.0 {
            return false;
        }
        let inv = 1.0 / nrm;
        for z in &mut v {
            *z *= inv;
        }
        self.cols.push(v);
        true
    }

    /// Qᴴ v.
    pub fn coeffs(&self, v: &[C64]) -> Vec<C64> {
        self.cols.iter().map(|q| dot_h(q, v)).collect()
    }

    /// ‖Qᴴ v‖₂² without materializing the coefficients.
    pub fn projected_energy(&self, v: &[C64]) -> f64 {
        self.cols.iter().map(|q| dot_h(q, v).norm_sqr()).sum()
    }
}

/// Thin-QR least squares for rows >= cols. Returns None on rank deficiency so
/// the caller can fall back to the SVD route.
pub(crate) fn lstsq_qr(a: &DenseMatrix, d: &DenseVector) -> Option<DenseVector> {
    let (m, n) = (a.rows(), a.cols());
    debug_assert!(m >= n);
    let mut basis = OrthoBasis::new(m);
    // r is upper triangular, column-major per new column.
    let mut r: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let col = a.col(j);
        let orig = vec_norm2(&col);
        let mut v = col;
        let mut coeffs = vec![Complex::new(0.0, 0.0); basis.len()];
        for _ in 0..2 {
            for (ci, q) in coeffs.iter_mut().zip(basis.cols()) {
                let c = dot_h(q, &v);
                axpy(-c, q, &mut v);
                *ci += c;
            }
        }
        let nrm = vec_norm2(&v);
        if nrm <= DEPENDENT_COL_TOL * orig || nrm == 0.0 {
            return None;
        }
        let inv = 1.0 / nrm;
        for z in &mut v {
            *z *= inv;
        }
        basis.cols.push(v);
        coeffs.push(Complex::new(nrm, 0.0));
        r.push(coeffs);
    }
    // Back-substitute R x = Qᴴ d.
    let mut x = basis.coeffs(d.as_slice());
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in (i + 1)..n {
            acc -= r[j][i] * x[j];
        }
        x[i] = acc / r[i][i].re;
    }
    Some(DenseVector::from_vec(x))
}
