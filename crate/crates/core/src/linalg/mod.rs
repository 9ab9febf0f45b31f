//! Dense complex kernels shared by every solver: pseudoinverse, damped LSQR,
//! singular values, and the Gram-Schmidt utilities the pursuits build on.

mod dense;
mod lsqr;
pub(crate) mod ortho;
mod svd;

pub use dense::{c, cr, C64, DenseMatrix, DenseVector};
pub use lsqr::{lsqr_damped, lsqr_default_max_iter, LSQR_TOL};
pub use svd::{lstsq_min_norm, max_singular_value, pinv, PINV_REL_TOL};

pub(crate) use dense::{axpy, dot_h, scale, vec_norm2};
pub(crate) use svd::{cholesky_solve, jacobi_svd};
