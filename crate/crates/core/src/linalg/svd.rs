//! Singular value machinery: one-sided Jacobi SVD, pseudoinverse, largest
//! singular value. Jacobi is slow for large operands but accurate down to the
//! smallest singular values, which is what the pseudoinverse truncation needs.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex;
use num_traits::Float;

use super::dense::{dot_h, vec_norm2, C64, DenseMatrix, DenseVector};
use crate::error::{Error, Result};

const JACOBI_SWEEP_LIMIT: usize = 60;
const JACOBI_TOL: f64 = 1e-15;

/// Thin SVD A = U diag(sigma) Vᴴ with sigma descending.
/// U is m x r and V is n x r with r = min(m, n); columns are stored as vectors.
pub(crate) struct Svd {
    pub u: Vec<Vec<C64>>,
    pub sigma: Vec<f64>,
    pub v: Vec<Vec<C64>>,
}

/// One-sided Jacobi on the columns of A (transposed first when m < n).
pub(crate) fn jacobi_svd(a: &DenseMatrix) -> Result<Svd> {
    if a.is_empty() {
        return Err(Error::EmptyOperand);
    }
    if a.rows() < a.cols() {
        let s = jacobi_svd(&a.conj_transpose())?;
        return Ok(Svd { u: s.v, sigma: s.sigma, v: s.u });
    }
    let (m, n) = (a.rows(), a.cols());
    let mut u: Vec<Vec<C64>> = (0..n).map(|j| a.col(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![Complex::new(0.0, 0.0); n];
            e[j] = Complex::new(1.0, 0.0);
            e
        })
        .collect();

    for _ in 0..JACOBI_SWEEP_LIMIT {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let aa: f64 = u[i].iter().map(|z| z.norm_sqr()).sum();
                let bb: f64 = u[j].iter().map(|z| z.norm_sqr()).sum();
                let g = dot_h(&u[i], &u[j]);
                let g2 = g.norm_sqr();
                if g2 <= JACOBI_TOL * JACOBI_TOL * aa * bb || g2 == 0.0 {
                    continue;
                }
                rotated = true;
                let d = g.norm();
                let phase = g / d; // e^{i phi} with g = d e^{i phi}
                let zeta = (bb - aa) / (2.0 * d);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let ct = 1.0 / (1.0 + t * t).sqrt();
                let st = phase.conj() * (ct * t);
                rotate_pair(&mut u, i, j, ct, st);
                rotate_pair(&mut v, i, j, ct, st);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let mut sigma: Vec<f64> = u.iter().map(|c| vec_norm2(c)).collect();
    order.sort_by(|&x, &y| sigma[y].total_cmp(&sigma[x]));
    let mut us = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);
    let mut ss = Vec::with_capacity(n);
    for &k in &order {
        let s = sigma[k];
        let mut col = core::mem::take(&mut u[k]);
        if s > 0.0 {
            for z in &mut col {
                *z /= s;
            }
        }
        us.push(col);
        vs.push(core::mem::take(&mut v[k]));
        ss.push(s);
    }
    sigma = ss;
    debug_assert_eq!(us.len(), n.min(m));
    Ok(Svd { u: us, sigma, v: vs })
}

fn rotate_pair(cols: &mut [Vec<C64>], i: usize, j: usize, ct: f64, st: C64) {
    // [ci' cj'] = [ci cj] * [[ct, conj(st)], [-st, ct]]
    let (lo, hi) = cols.split_at_mut(j);
    let ci = &mut lo[i];
    let cj = &mut hi[0];
    for (a, b) in ci.iter_mut().zip(cj.iter_mut()) {
        let x = *a;
        let y = *b;
        *a = x * ct - y * st;
        *b = y * ct + x * st.conj();
    }
}

/// Moore-Penrose pseudoinverse by SVD; singular values below
/// rel_tol * sigma_max count as zero.
pub fn pinv(a: &DenseMatrix, rel_tol: f64) -> Result<DenseMatrix> {
    if a.is_empty() {
        return Err(Error::EmptyOperand);
    }
    if !(0.0..1.0).contains(&rel_tol) {
        return Err(Error::InvalidParam("pinv rel_tol must lie in [0,1)"));
    }
    let svd = jacobi_svd(a)?;
    let cutoff = rel_tol * svd.sigma.first().copied().unwrap_or(0.0);
    let (m, n) = (a.rows(), a.cols());
    let mut out = DenseMatrix::zeros(n, m);
    for ((s, uc), vc) in svd.sigma.iter().zip(&svd.u).zip(&svd.v) {
        if *s <= cutoff || *s == 0.0 {
            continue;
        }
        let inv = 1.0 / s;
        for i in 0..n {
            let vi = vc[i] * inv;
            for j in 0..m {
                out[(i, j)] += vi * uc[j].conj();
            }
        }
    }
    Ok(out)
}

/// Default truncation threshold for [`pinv`].
pub const PINV_REL_TOL: f64 = 1e-12;

/// sigma_max(A) by power iteration on AᴴA. Deterministic start vector; the
/// Rayleigh quotient converges at twice the subspace rate, so the value is
/// accurate well before the vector is.
pub fn max_singular_value(a: &DenseMatrix) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptyOperand);
    }
    let n = a.cols();
    let mut z: Vec<C64> = (0..n)
        .map(|j| Complex::new(1.0 + 0.1 * ((j % 7) as f64), 0.03 * ((j % 5) as f64)))
        .collect();
    let mut rho_prev = 0.0;
    let mut stable = 0;
    for _ in 0..20_000 {
        let az = a.matvec(&z);
        let zn = vec_norm2(&z);
        if zn == 0.0 {
            return Ok(0.0);
        }
        let rho = vec_norm2(&az) / zn; // current sigma estimate
        if rho == 0.0 {
            return Ok(0.0);
        }
        if (rho - rho_prev).abs() <= 1e-15 * rho {
            stable += 1;
            if stable >= 3 {
                return Ok(rho);
            }
        } else {
            stable = 0;
        }
        rho_prev = rho;
        z = a.herm_matvec(&az);
        let nrm = vec_norm2(&z);
        if nrm == 0.0 {
            return Ok(rho);
        }
        let inv = 1.0 / nrm;
        for zi in &mut z {
            *zi *= inv;
        }
    }
    Ok(rho_prev)
}

/// Minimum-norm least-squares solution of A x ~ d.
///
/// Fast paths: thin QR when rows >= cols, Gram/Cholesky when rows < cols;
/// both fall back to the SVD route whenever rank deficiency shows up, which
/// keeps the result equal to pinv(A) d in all cases.
pub fn lstsq_min_norm(a: &DenseMatrix, d: &DenseVector) -> Result<DenseVector> {
    if a.is_empty() {
        return Err(Error::EmptyOperand);
    }
    if a.rows() != d.len() {
        return Err(Error::DimMismatch("lstsq_min_norm"));
    }
    if a.rows() >= a.cols() {
        if let Some(x) = super::ortho::lstsq_qr(a, d) {
            return Ok(x);
        }
    } else if let Some(x) = lstsq_gram(a, d) {
        return Ok(x);
    }
    let svd = jacobi_svd(a)?;
    let cutoff = PINV_REL_TOL * svd.sigma.first().copied().unwrap_or(0.0);
    let mut x = vec![Complex::new(0.0, 0.0); a.cols()];
    for ((s, uc), vc) in svd.sigma.iter().zip(&svd.u).zip(&svd.v) {
        if *s <= cutoff || *s == 0.0 {
            continue;
        }
        let coeff = dot_h(uc, d.as_slice()) / s;
        for (xi, vi) in x.iter_mut().zip(vc) {
            *xi += vi * coeff;
        }
    }
    Ok(DenseVector::from_vec(x))
}

/// Wide full-row-rank path: x = Aᴴ (A Aᴴ)^{-1} d via Cholesky.
fn lstsq_gram(a: &DenseMatrix, d: &DenseVector) -> Option<DenseVector> {
    let m = a.rows();
    let mut gram = DenseMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let mut acc = Complex::new(0.0, 0.0);
            for (x, y) in a.row(i).iter().zip(a.row(j)) {
                acc += x * y.conj();
            }
            gram[(i, j)] = acc;
            gram[(j, i)] = acc.conj();
        }
    }
    let y = cholesky_solve(&mut gram, d.as_slice())?;
    Some(DenseVector::from_vec(a.herm_matvec(&y)))
}

/// In-place Hermitian positive-definite solve; None when a pivot degenerates.
pub(crate) fn cholesky_solve(g: &mut DenseMatrix, b: &[C64]) -> Option<Vec<C64>> {
    let n = g.rows();
    let scale: f64 = (0..n).map(|i| g[(i, i)].re).fold(0.0, f64::max);
    for k in 0..n {
        let mut piv = g[(k, k)].re;
        for j in 0..k {
            piv -= g[(k, j)].norm_sqr();
        }
        if piv <= 1e-13 * scale {
            return None;
        }
        let piv = piv.sqrt();
        g[(k, k)] = Complex::new(piv, 0.0);
        for i in (k + 1)..n {
            let mut acc = g[(i, k)];
            for j in 0..k {
                acc -= g[(i, j)] * g[(k, j)].conj();
            }
            g[(i, k)] = acc / piv;
        }
    }
    // L y = b, then Lᴴ x = y.
    let mut x: Vec<C64> = b.to_vec();
    for i in 0..n {
        let mut acc = x[i];
        for j in 0..i {
            acc -= g[(i, j)] * x[j];
        }
        x[i] = acc / g[(i, i)].re;
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in (i + 1)..n {
            acc -= g[(j, i)].conj() * x[j];
        }
        x[i] = acc / g[(i, i)].re;
    }
    Some(x)
}
