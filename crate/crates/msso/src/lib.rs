//! Std companion for the MSSO solvers: file formats, cone-solver
//! adapters, the algorithm registry, experiment harness, and the
//! pulse-design benchmark behind the `msso` binary.

pub mod adapter;
pub mod dispatch;
pub mod formats;
pub mod harness;
pub mod mri;
pub mod rng;
