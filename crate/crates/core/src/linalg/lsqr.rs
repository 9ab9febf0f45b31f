//! Damped LSQR: Golub-Kahan bidiagonalization with plane rotations folding in
//! the damping term, following Paige & Saunders. Vectors are complex; all the
//! rotation scalars stay real.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex;
use num_traits::Float;

use super::dense::{scale, vec_norm2, C64, DenseMatrix, DenseVector};
use crate::error::{Error, Result};

/// Default convergence tolerance (relative residual-gradient norm).
pub const LSQR_TOL: f64 = 1e-10;

/// Default iteration cap for an `rows x cols` operand.
pub fn lsqr_default_max_iter(rows: usize, cols: usize) -> usize {
    4 * rows.max(cols)
}

/// Minimizes ‖d − Aq‖₂² + λ‖q‖₂². The λ penalty maps onto the classical LSQR
/// damping parameter √λ.
pub fn lsqr_damped(
    a: &DenseMatrix,
    d: &DenseVector,
    lambda: f64,
    tol: f64,
    max_iter: usize,
) -> Result<DenseVector> {
    if a.rows() != d.len() {
        return Err(Error::DimMismatch("lsqr_damped"));
    }
    if lambda < 0.0 {
        return Err(Error::InvalidParam("lambda must be nonnegative"));
    }
    if a.is_empty() {
        return Err(Error::EmptyOperand);
    }
    let damp = lambda.sqrt();
    let cols = a.cols();

    let mut x = vec![Complex::new(0.0, 0.0); cols];

    // beta u = d; alpha v = A^H u.
    let mut u: Vec<C64> = d.as_slice().to_vec();
    let mut beta = vec_norm2(&u);
    if beta == 0.0 {
        return Ok(DenseVector::from_vec(x));
    }
    scale(1.0 / beta, &mut u);
    let mut v = a.herm_matvec(&u);
    let mut alpha = vec_norm2(&v);
    if alpha > 0.0 {
        scale(1.0 / alpha, &mut v);
    }
    let mut w = v.clone();

    if alpha * beta == 0.0 {
        return Ok(DenseVector::from_vec(x)); // d is orthogonal to range(A)
    }

    let bnorm = beta;
    let mut rhobar = alpha;
    let mut phibar = beta;
    let mut bbnorm = 0.0_f64; // Frobenius norm accumulator
    let mut ddnorm = 0.0_f64;
    let mut res_damp = 0.0_f64; // accumulated psi^2 from the damping rotations
    let mut xxnorm = 0.0_f64;
    let mut cs2 = -1.0_f64;
    let mut sn2 = 0.0_f64;
    let mut zeta = 0.0_f64;

    for _ in 0..max_iter {
        // Bidiagonalization step: beta u = A v - alpha u; alpha v = A^H u - beta v.
        let av = a.matvec(&v);
        for (ui, avi) in u.iter_mut().zip(&av) {
            *ui = avi - alpha * *ui;
        }
        beta = vec_norm2(&u);
        bbnorm += alpha * alpha + beta * beta + damp * damp;
        if beta > 0.0 {
            scale(1.0 / beta, &mut u);
            let ahu = a.herm_matvec(&u);
            for (vi, ahui) in v.iter_mut().zip(&ahu) {
                *vi = ahui - beta * *vi;
            }
            alpha = vec_norm2(&v);
            if alpha > 0.0 {
                scale(1.0 / alpha, &mut v);
            }
        }

        // Rotation eliminating the damping entry.
        let rhobar1 = (rhobar * rhobar + damp * damp).sqrt();
        let cs1 = rhobar / rhobar1;
        let sn1 = damp / rhobar1;
        let psi = sn1 * phibar;
        phibar *= cs1;

        // Rotation eliminating the subdiagonal beta.
        let rho = (rhobar1 * rhobar1 + beta * beta).sqrt();
        let cs = rhobar1 / rho;
        let sn = beta / rho;
        let theta = sn * alpha;
        rhobar = -cs * alpha;
        let phi = cs * phibar;
        phibar *= sn;
        let tau = sn * phi;

        let t1 = phi / rho;
        let t2 = -theta / rho;
        for i in 0..cols {
            x[i] += t1 * w[i];
            ddnorm += (w[i].norm_sqr()) / (rho * rho);
            w[i] = v[i] + t2 * w[i];
        }

        // Right rotation estimating ‖x‖.
        let delta = sn2 * rho;
        let gammabar = -cs2 * rho;
        let zetabar = (phi - delta * zeta) / gammabar;
        let sol_norm = (xxnorm + zetabar * zetabar).sqrt();
        let gamma = (gammabar * gammabar + theta * theta).sqrt();
        cs2 = gammabar / gamma;
        sn2 = theta / gamma;
        zeta = (phi - delta * zeta) / gamma;
        xxnorm += zeta * zeta;

        let frob = bbnorm.sqrt();
        let cond = frob * ddnorm.sqrt();
        res_damp += psi * psi;
        let resid_norm = (phibar * phibar + res_damp).sqrt();
        let grad_norm = alpha * tau.abs(); // ‖Aᴴ r̄‖ for the damped system

        let stop1 = resid_norm / bnorm;
        let stop2 = if resid_norm > 0.0 { grad_norm / (frob * resid_norm) } else { 0.0 };
        let resid_tol = tol + tol * frob * sol_norm / bnorm;
        let eps = f64::EPSILON;
        let resid_tol_mach = eps + eps * frob * sol_norm / bnorm;

        if 1.0 / cond <= eps || stop2 <= eps || stop1 <= resid_tol_mach {
            break;
        }
        if stop2 <= tol || stop1 <= resid_tol {
            break;
        }
    }

    Ok(DenseVector::from_vec(x))
}
