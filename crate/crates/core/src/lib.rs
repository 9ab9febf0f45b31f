//! Solvers for the multiple-system single-output (MSSO) simultaneous sparse
//! approximation problem: one observed vector d explained as the superposition
//! of P linear systems, d = sum_p F_p g_p, where the unknown weight vectors
//! g_1..g_P must share a common small support.
//!
//! The crate is organized around that problem statement:
//! `model` holds the problem/solution types and the objective,
//! `greedy` the matching-pursuit family (MP, OMP, LSMP),
//! `relax` the relaxation minimizers (IRLS, row- and column-based shrinkage),
//! `cone` the second-order cone embedding plus the solver adapter contract,
//! and `linalg` the dense complex kernels everything sits on.
//!
//! No_std with `alloc`; nothing here does IO, timing, or threading.

#![no_std]

extern crate alloc;

pub mod cone;
mod error;
pub mod greedy;
pub mod linalg;
pub mod model;
pub mod relax;

pub use error::{Error, Result};
