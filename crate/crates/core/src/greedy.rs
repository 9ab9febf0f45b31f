//! Greedy pursuits that build a sparsity profile one column block at a time.
//!
//! All three solvers share the same scoring rule (projection energy of the
//! residual onto a block's column span) and the same final weight computation
//! (an exact least-squares refit on the chosen blocks). They differ in how the
//! running residual is maintained:
//!
//! * [`run_mp`] deflates the residual against the chosen block only and may
//!   pick the same block again later.
//! * [`run_omp`] keeps the residual orthogonal to every block chosen so far
//!   and never repeats an index.
//! * [`run_lsmp`] scores each candidate by the refit it would achieve jointly
//!   with the blocks already chosen, at the price of a fresh factorization per
//!   candidate.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::ortho::OrthoBasis;
use crate::linalg::{axpy, dot_h, DenseMatrix, DenseVector};
use crate::model::{column_view, retune, MssoProblem, SolutionG, SparsityProfile};

/// Fraction of ‖d‖ below which the residual counts as exhausted.
pub const GREEDY_RESIDUAL_TOL: f64 = 1e-10;

/// Orthonormal spans of every column block, built once up front.
///
/// Block n holds an orthonormal basis V_n for the columns of C_n, so the
/// projection Q_n r = C_n C_n† r is evaluated as V_n (V_nᴴ r) without ever
/// forming an M×M projector, and the selection score rᴴ Q_n r is ‖V_nᴴ r‖².
pub struct Projectors {
    bases: Vec<OrthoBasis>,
}

impl Projectors {
    pub fn new(problem: &MssoProblem) -> Self {
        let view = column_view(problem);
        let m = problem.m();
        let bases = view
            .blocks()
            .iter()
            .map(|block| {
                let mut basis = OrthoBasis::new(m);
                for j in 0..block.cols() {
                    basis.push(&block.col(j));
                }
                basis
            })
            .collect();
        Projectors { bases }
    }

    pub fn n(&self) -> usize {
        self.bases.len()
    }

    /// rᴴ Q_n r for the zero-based block index.
    pub fn score(&self, n: usize, r: &DenseVector) -> f64 {
        self.bases[n].projected_energy(r.as_slice())
    }

    /// r ← r − Q_n r for the zero-based block index.
    pub fn deflate(&self, n: usize, r: &mut DenseVector) {
        self.bases[n].deflate(r.as_mut_slice());
    }
}

/// Running state of a pursuit: chosen indices (one-based, selection order,
/// distinct), the stacked chosen blocks, the residual, and the iteration
/// count. `stacked` always equals the horizontal concatenation of C_q over
/// `chosen`; repeats in MP update the residual without growing it.
pub struct GreedyState {
    pub chosen: Vec<usize>,
    pub stacked: DenseMatrix,
    pub residual: DenseVector,
    pub iteration: usize,
}

impl GreedyState {
    fn start(problem: &MssoProblem) -> Self {
        GreedyState {
            chosen: Vec::new(),
            stacked: DenseMatrix::zeros(problem.m(), 0),
            residual: problem.d().clone(),
            iteration: 0,
        }
    }

    fn admit(&mut self, problem: &MssoProblem, q_zero: usize) {
        if !self.chosen.contains(&(q_zero + 1)) {
            self.chosen.push(q_zero + 1);
            let view = column_view(problem);
            let mut parts: Vec<&DenseMatrix> = Vec::with_capacity(self.chosen.len());
            let blocks: Vec<DenseMatrix> = self
                .chosen
                .iter()
                .map(|&one| view.block(one - 1).clone())
                .collect();
            parts.extend(blocks.iter());
            self.stacked = DenseMatrix::hstack(&parts).expect("chosen blocks share row count");
        }
    }
}

/// Outcome report shared by every solver in this crate.
///
/// For the pursuits the trace records ½‖r_k‖² after each iteration; the
/// relaxation solvers record their own objective. `selection_order` lists the
/// profile one block per entry: pursuits record the order blocks were first
/// admitted, relaxation solvers rank rows by decreasing energy. `wall_time_s`
/// is zero here and is filled in by hosts that have a clock.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub objective_trace: Vec<f64>,
    pub selected: SparsityProfile,
    pub selection_order: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time_s: f64,
}

fn select_best(proj: &Projectors, r: &DenseVector, taken: &[usize]) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for n in 0..proj.n() {
        if taken.contains(&(n + 1)) {
            continue;
        }
        let s = proj.score(n, r);
        match best {
            Some((bs, _)) if s <= bs => {}
            _ => best = Some((s, n)),
        }
    }
    best.map(|(_, n)| n)
}

/// One-based index of the block whose span captures the most residual
/// energy: argmax_n rᴴ Q_n r, lowest index on ties.
pub fn mp_select(proj: &Projectors, r: &DenseVector) -> Result<usize> {
    if r.norm2() == 0.0 {
        return Err(Error::ZeroResidual);
    }
    select_best(proj, r, &[])
        .map(|n| n + 1)
        .ok_or(Error::EmptyOperand)
}

/// Least-squares refit on the profile's blocks; an empty profile yields the
/// all-zero solution.
pub fn finalize_weights(problem: &MssoProblem, profile: &SparsityProfile) -> Result<SolutionG> {
    if profile.is_empty() {
        return Ok(SolutionG::zeros(problem.n(), problem.p()));
    }
    retune(problem, profile)
}

fn finish(
    problem: &MssoProblem,
    state: GreedyState,
    trace: Vec<f64>,
    d_norm: f64,
) -> Result<(SolutionG, SolveReport)> {
    let mut selection_order = Vec::new();
    for &q in &state.chosen {
        if !selection_order.contains(&q) {
            selection_order.push(q);
        }
    }
    let profile = SparsityProfile::new(state.chosen.clone());
    let g = finalize_weights(problem, &profile)?;
    let converged = state.residual.norm2() <= GREEDY_RESIDUAL_TOL * d_norm;
    let report = SolveReport {
        objective_trace: trace,
        selected: profile,
        selection_order,
        iterations: state.iteration,
        converged,
        wall_time_s: 0.0,
    };
    Ok((g, report))
}

/// Matching pursuit: deflate the residual against the winning block each
/// iteration. Up to `k` selections; repeats allowed, so the profile may end
/// up smaller than `k`.
pub fn run_mp(problem: &MssoProblem, k: usize) -> Result<(SolutionG, SolveReport)> {
    if k == 0 {
        return Err(Error::InvalidParam("greedy sparsity target K must be >= 1"));
    }
    let proj = Projectors::new(problem);
    let d_norm = problem.d().norm2();
    let mut state = GreedyState::start(problem);
    let mut trace = Vec::new();
    while state.iteration < k {
        if state.residual.norm2() <= GREEDY_RESIDUAL_TOL * d_norm {
            break;
        }
        let q = mp_select(&proj, &state.residual)? - 1;
        state.iteration += 1;
        state.admit(problem, q);
        proj.deflate(q, &mut state.residual);
        let rn = state.residual.norm2();
        trace.push(0.5 * rn * rn);
    }
    finish(problem, state, trace, d_norm)
}

/// Orthogonal matching pursuit: same selection rule restricted to unchosen
/// blocks, with the residual kept orthogonal to everything chosen so far.
pub fn run_omp(problem: &MssoProblem, k: usize) -> Result<(SolutionG, SolveReport)> {
    if k == 0 {
        return Err(Error::InvalidParam("greedy sparsity target K must be >= 1"));
    }
    let proj = Projectors::new(problem);
    let view = column_view(problem);
    let d = problem.d();
    let d_norm = d.norm2();
    let mut basis = OrthoBasis::new(problem.m());
    let mut state = GreedyState::start(problem);
    let mut trace = Vec::new();
    while state.iteration < k && state.chosen.len() < problem.n() {
        if state.residual.norm2() <= GREEDY_RESIDUAL_TOL * d_norm {
            break;
        }
        let Some(q) = select_best(&proj, &state.residual, &state.chosen) else {
            break;
        };
        state.iteration += 1;
        state.admit(problem, q);
        let block = view.block(q);
        for j in 0..block.cols() {
            basis.push(&block.col(j));
        }
        state.residual = project_out(&basis, d);
        let rn = state.residual.norm2();
        trace.push(0.5 * rn * rn);
    }
    finish(problem, state, trace, d_norm)
}

/// d minus its projection onto the basis span.
fn project_out(basis: &OrthoBasis, d: &DenseVector) -> DenseVector {
    let mut r = d.clone();
    let coef = basis.coeffs(d.as_slice());
    for (u, c) in basis.cols().iter().zip(coef) {
        axpy(-c, u, r.as_mut_slice());
    }
    r
}

/// Least-squares matching pursuit: each candidate is scored by the energy d
/// would retain after refitting jointly with the blocks already chosen, which
/// costs one fresh factorization of [S_{k−1}, C_n] per candidate.
pub fn run_lsmp(problem: &MssoProblem, k: usize) -> Result<(SolutionG, SolveReport)> {
    if k == 0 {
        return Err(Error::InvalidParam("greedy sparsity target K must be >= 1"));
    }
    let view = column_view(problem);
    let d = problem.d();
    let d_norm = d.norm2();
    let mut state = GreedyState::start(problem);
    let mut trace = Vec::new();
    let mut basis = OrthoBasis::new(problem.m());
    while state.iteration < k && state.chosen.len() < problem.n() {
        if state.residual.norm2() <= GREEDY_RESIDUAL_TOL * d_norm {
            break;
        }
        let base_energy = basis.projected_energy(d.as_slice());
        let mut best: Option<(f64, usize)> = None;
        for cand in 0..problem.n() {
            if state.chosen.contains(&(cand + 1)) {
                continue;
            }
            let mut ext = basis.clone();
            let before = ext.len();
            let block = view.block(cand);
            for j in 0..block.cols() {
                ext.push(&block.col(j));
            }
            let added: f64 = ext.cols()[before..]
                .iter()
                .map(|u| dot_h(u, d.as_slice()).norm_sqr())
                .sum();
            let score = base_energy + added;
            match best {
                Some((bs, _)) if score <= bs => {}
                _ => best = Some((score, cand)),
            }
        }
        let Some((_, q)) = best else { break };
        state.iteration += 1;
        state.admit(problem, q);
        let block = view.block(q);
        for j in 0..block.cols() {
            basis.push(&block.col(j));
        }
        state.residual = project_out(&basis, d);
        let rn = state.residual.norm2();
        trace.push(0.5 * rn * rn);
    }
    finish(problem, state, trace, d_norm)
}
