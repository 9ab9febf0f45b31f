//! Relaxation minimizers for the penalized objective
//! ½‖d − Σ_p F_p g_p‖² + λ·Σ_n ‖h_n‖₂.
//!
//! Three schemes with very different inner structure:
//!
//! * [`irls`] reweights the penalty into a quadratic each outer iteration and
//!   solves the resulting ridge problem with damped LSQR, then line-searches
//!   between the old and new iterates.
//! * [`rbrs`] sweeps the rows, solving each row's small P×P shrinkage
//!   subproblem by a reweighted fixed point. Real problems only; complex
//!   inputs go through the stacking reduction first.
//! * [`cbcs`] sweeps the columns, updating each unknown vector through a
//!   separable surrogate whose curvature bound keeps every step monotone.
//!   Real problems only; complex inputs go through the splitting reduction.
//!
//! Every solver records the exact objective once per outer iteration and the
//! traces never increase: candidate steps that fail to improve are discarded
//! in favor of the best iterate seen.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::greedy::SolveReport;
use crate::linalg::{
    cholesky_solve, lsqr_damped, lsqr_default_max_iter, lstsq_min_norm, max_singular_value, C64,
    DenseMatrix, DenseVector, LSQR_TOL,
};
use crate::model::{
    column_view, objective, profile_of, ranked_rows, residual, MssoProblem, RelaxParams,
    SolutionG,
};

/// Interval width at which the golden-section search stops; reaching it from
/// [0,1] takes about forty objective evaluations.
pub const LINE_SEARCH_TOL: f64 = 1e-8;

/// Rows of G with more than P of these entries per column fall back from the
/// direct P×P row solve to damped LSQR.
pub const RBRS_DIRECT_LIMIT: usize = 64;

/// Starting point for the reweighted iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IrlsInit {
    /// h = C_tot† d. An all-zeros start would blow up the weights, so the
    /// least-squares point is the default.
    Pseudoinverse,
    /// h = 1 everywhere; useful when the pseudoinverse is too expensive.
    Ones,
}

/// Bookkeeping for one reweighted iteration: the diagonal of W_tot (ordered
/// like h_tot), the current h_tot estimate, and the last accepted step size.
pub struct IrlsState {
    pub weights: Vec<f64>,
    pub current: DenseVector,
    pub step: f64,
}

/// Shared sweep state for the two shrinkage solvers. `alpha`, `b`, and `v`
/// are only populated by the column sweep; the row sweep leaves them empty.
pub struct ShrinkState {
    pub current: SolutionG,
    pub residual: DenseVector,
    pub alpha: f64,
    pub b: Vec<f64>,
    pub v: Vec<f64>,
}

/// Diagonal of the reweighting matrix W_tot: entry nP+p equals
/// 2/(‖h_n‖₂ + ε), so ½·hᴴWh reproduces Σ‖h_n‖ up to the ε smoothing.
pub fn irls_weights(g: &SolutionG, epsilon: f64) -> Vec<f64> {
    let p = g.p();
    let mut w = Vec::with_capacity(g.n() * p);
    for n in 0..g.n() {
        let wn = 2.0 / (g.row_norm(n) + epsilon);
        for _ in 0..p {
            w.push(wn);
        }
    }
    w
}

/// Golden-section search on [0,1] that returns the best sampled point, the
/// endpoints included, so f(μ₀) ≤ min(f(0), f(1)) holds even when f is not
/// unimodal.
pub fn line_search_mu(mut f: impl FnMut(f64) -> f64, tol: f64) -> f64 {
    let tol = tol.max(1e-12);
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut best = (f(0.0), 0.0);
    let f_one = f(1.0);
    if f_one < best.0 {
        best = (f_one, 1.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    if f1 < best.0 {
        best = (f1, x1);
    }
    let mut f2 = f(x2);
    if f2 < best.0 {
        best = (f2, x2);
    }
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            if f1 < best.0 {
                best = (f1, x1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            if f2 < best.0 {
                best = (f2, x2);
            }
        }
    }
    best.1
}

/// Reweighted least squares with the pseudoinverse start.
pub fn irls(problem: &MssoProblem, params: &RelaxParams) -> Result<(SolutionG, SolveReport)> {
    irls_with_init(problem, params, IrlsInit::Pseudoinverse)
}

/// Reweighted least squares with an explicit starting point.
///
/// Each outer iteration rewrites λΣ‖h_n‖ as the quadratic ½λ·hᴴW h at the
/// current weights, pulls W into the system (A = C_tot W^{−1/2}), solves the
/// damped problem with LSQR, and takes the best convex combination of the old
/// and new iterates found by a line search on the exact objective.
pub fn irls_with_init(
    problem: &MssoProblem,
    params: &RelaxParams,
    init: IrlsInit,
) -> Result<(SolutionG, SolveReport)> {
    params.validate()?;
    let view = column_view(problem);
    let c_tot = view.stacked();
    let d = problem.d();
    let (nn, pp) = (problem.n(), problem.p());
    let mut g = match init {
        IrlsInit::Pseudoinverse => {
            let h = lstsq_min_norm(&c_tot, d)?;
            SolutionG::from_h_tot(nn, pp, h.as_slice())
        }
        IrlsInit::Ones => {
            SolutionG::from_h_tot(nn, pp, &vec![Complex::new(1.0, 0.0); nn * pp])
        }
    };
    let mut obj = objective(problem, &g, params.lambda)?;
    let mut state = IrlsState { weights: Vec::new(), current: g.h_tot(), step: 0.0 };
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..params.max_outer {
        iterations += 1;
        state.weights = irls_weights(&g, params.epsilon);
        let inv_root: Vec<f64> = state.weights.iter().map(|w| 1.0 / w.sqrt()).collect();
        let mut a = c_tot.clone();
        for i in 0..a.rows() {
            for (j, s) in inv_root.iter().enumerate() {
                a[(i, j)] *= *s;
            }
        }
        let q = lsqr_damped(
            &a,
            d,
            params.lambda,
            LSQR_TOL,
            lsqr_default_max_iter(a.rows(), a.cols()),
        )?;
        let h_prev = g.h_tot();
        let h_tmp: Vec<C64> = q
            .as_slice()
            .iter()
            .zip(&inv_root)
            .map(|(qi, s)| qi * *s)
            .collect();
        let blend = |mu: f64| -> Vec<C64> {
            h_prev
                .as_slice()
                .iter()
                .zip(&h_tmp)
                .map(|(old, new)| old + (new - old) * mu)
                .collect()
        };
        let mu = line_search_mu(
            |mu| {
                let cand = SolutionG::from_h_tot(nn, pp, &blend(mu));
                objective(problem, &cand, params.lambda).unwrap_or(f64::INFINITY)
            },
            LINE_SEARCH_TOL,
        );
        let cand = SolutionG::from_h_tot(nn, pp, &blend(mu));
        let cand_obj = objective(problem, &cand, params.lambda)?;
        let drop = obj - cand_obj;
        if cand_obj <= obj {
            g = cand;
            obj = cand_obj;
            state.current = g.h_tot();
            state.step = mu;
        }
        trace.push(obj);
        if drop < params.delta {
            converged = true;
            break;
        }
    }
    let selected = profile_of(&g, nn);
    let selection_order = ranked_rows(&g);
    Ok((
        g,
        SolveReport {
            objective_trace: trace,
            selected,
            selection_order,
            iterations,
            converged,
            wall_time_s: 0.0,
        },
    ))
}

fn require_real(problem: &MssoProblem, solver: &'static str, reduction: &'static str) -> Result<()> {
    if problem.is_real() {
        Ok(())
    } else {
        Err(Error::NotRealValued { solver, reduction })
    }
}

/// ½‖r_j − C_j x‖² + λ‖x‖ for one row against its partial residual.
fn row_objective(cj: &DenseMatrix, rj: &[C64], x: &[C64], lambda: f64) -> f64 {
    let cx = cj.matvec(x);
    let fit: f64 = rj
        .iter()
        .zip(&cx)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    let xn: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    0.5 * fit + lambda * xn
}

/// Row-based shrinkage on a real problem.
///
/// Each sweep visits the rows in order; row j sees the residual with its own
/// contribution added back (r_j = r + C_j h_j) and runs the reweighted fixed
/// point x ← [C_jᵀC_j + (λ/(‖x‖+ε))I]⁻¹ C_jᵀ r_j, keeping the best iterate
/// so a row update never worsens its own objective. The global residual is
/// recomputed from scratch at the start of every sweep to stop drift.
pub fn rbrs(problem: &MssoProblem, params: &RelaxParams) -> Result<(SolutionG, SolveReport)> {
    params.validate()?;
    require_real(problem, "row-based shrinkage", "stacking")?;
    let view = column_view(problem);
    let (nn, pp) = (problem.n(), problem.p());
    let grams: Vec<DenseMatrix> = view
        .blocks()
        .iter()
        .map(|c| c.conj_transpose().matmul(c))
        .collect();
    let mut state = ShrinkState {
        current: SolutionG::zeros(nn, pp),
        residual: problem.d().clone(),
        alpha: 0.0,
        b: Vec::new(),
        v: Vec::new(),
    };
    let mut obj = objective(problem, &state.current, params.lambda)?;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..params.max_outer {
        iterations += 1;
        state.residual = residual(problem, &state.current)?;
        for j in 0..nn {
            let cj = view.block(j);
            let hj = state.current.row(j).to_vec();
            let cj_hj = cj.matvec(&hj);
            let rj: Vec<C64> = state
                .residual
                .as_slice()
                .iter()
                .zip(&cj_hj)
                .map(|(r, c)| r + c)
                .collect();
            let cj_t_rj: Vec<C64> = cj.herm_matvec(&rj);
            let mut best_x = hj.clone();
            let mut best_f = row_objective(cj, &rj, &hj, params.lambda);
            let mut x = hj;
            let mut f_prev = best_f;
            for _ in 0..params.max_inner {
                let w = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() + params.epsilon;
                let ridge = params.lambda / w;
                let x_new = solve_row(cj, &grams[j], &cj_t_rj, &rj, ridge, pp)?;
                let f_new = row_objective(cj, &rj, &x_new, params.lambda);
                if f_new < best_f {
                    best_f = f_new;
                    best_x = x_new.clone();
                }
                let dropped = f_prev - f_new;
                x = x_new;
                if dropped < params.delta {
                    break;
                }
                f_prev = f_new;
            }
            let cj_best = cj.matvec(&best_x);
            for ((r, old), new) in state
                .residual
                .as_mut_slice()
                .iter_mut()
                .zip(&cj_hj)
                .zip(&cj_best)
            {
                *r = *r + old - new;
            }
            state.current.row_mut(j).copy_from_slice(&best_x);
        }
        let obj_new = objective(problem, &state.current, params.lambda)?;
        let drop = obj - obj_new;
        obj = obj_new.min(obj);
        trace.push(obj);
        if drop < params.delta {
            converged = true;
            break;
        }
    }
    let selected = profile_of(&state.current, nn);
    let selection_order = ranked_rows(&state.current);
    Ok((
        state.current,
        SolveReport {
            objective_trace: trace,
            selected,
            selection_order,
            iterations,
            converged,
            wall_time_s: 0.0,
        },
    ))
}

/// One ridge-regularized row solve: direct Cholesky on the P×P system while P
/// stays small, damped LSQR beyond that, and a minimum-norm fallback when the
/// unregularized Gram is singular.
fn solve_row(
    cj: &DenseMatrix,
    gram: &DenseMatrix,
    cj_t_rj: &[C64],
    rj: &[C64],
    ridge: f64,
    pp: usize,
) -> Result<Vec<C64>> {
    if pp <= RBRS_DIRECT_LIMIT {
        let mut m = gram.clone();
        for t in 0..pp {
            m[(t, t)] += Complex::new(ridge, 0.0);
        }
        if let Some(x) = cholesky_solve(&mut m, cj_t_rj) {
            return Ok(x);
        }
    }
    let rhs = DenseVector::from_vec(rj.to_vec());
    if ridge > 0.0 || pp > RBRS_DIRECT_LIMIT {
        let x = lsqr_damped(
            cj,
            &rhs,
            ridge,
            LSQR_TOL,
            lsqr_default_max_iter(cj.rows(), cj.cols()),
        )?;
        Ok(x.as_slice().to_vec())
    } else {
        // λ = 0 with a rank-deficient block: any least-squares row works
        let x = lstsq_min_norm(cj, &rhs)?;
        Ok(x.as_slice().to_vec())
    }
}

/// ½‖r − F_p g_p‖² + λ·Σ_n √(g_p[n]² + b[n]): the exact objective as seen
/// from one column, the other columns folded into r and b.
fn column_objective(fp: &DenseMatrix, r: &[C64], b: &[f64], lambda: f64, gp: &[f64]) -> f64 {
    let gc: Vec<C64> = gp.iter().map(|&x| Complex::new(x, 0.0)).collect();
    let fg = fp.matvec(&gc);
    let fit: f64 = r.iter().zip(&fg).map(|(a, c)| (a - c).norm_sqr()).sum();
    let pen: f64 = gp.iter().zip(b).map(|(&x, &bn)| (x * x + bn).sqrt()).sum();
    0.5 * fit + lambda * pen
}

/// Scalar curvature bound for the column sweep: large enough that
/// αI − F_pᵀF_p stays positive semidefinite for every system, and at least
/// the largest singular value for scaling parity with small dictionaries.
pub fn cbcs_curvature(problem: &MssoProblem) -> Result<f64> {
    let mut alpha = 0.0_f64;
    for f in problem.systems() {
        let s = max_singular_value(f)?;
        alpha = alpha.max(s.max(s * s));
    }
    if alpha == 0.0 {
        // all-zero dictionary: nothing to fit; unit curvature keeps the
        // fixed point defined and it settles at g = 0 immediately
        alpha = 1.0;
    }
    Ok(alpha)
}

/// Column-based shrinkage on a real problem.
///
/// The curvature bound α ≥ σ_max(F_p)² makes αI − F_pᵀF_p positive
/// semidefinite for every system, which turns the column subproblem into N
/// independent scalar shrinkage problems per pass. Each column is repeated
/// until its objective stops improving before the sweep moves on.
pub fn cbcs(problem: &MssoProblem, params: &RelaxParams) -> Result<(SolutionG, SolveReport)> {
    params.validate()?;
    require_real(problem, "column-based shrinkage", "splitting")?;
    let (nn, pp) = (problem.n(), problem.p());
    let d = problem.d();
    let alpha = cbcs_curvature(problem)?;
    let mut state = ShrinkState {
        current: SolutionG::zeros(nn, pp),
        residual: d.clone(),
        alpha,
        b: vec![0.0; nn],
        v: vec![0.0; nn],
    };
    let mut obj = objective(problem, &state.current, params.lambda)?;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..params.max_outer {
        iterations += 1;
        for p_idx in 0..pp {
            // residual of everything except column p, and the cross-column
            // row energies b[n] = Σ_{q≠p} g_q[n]²; both fixed while this
            // column repeats
            let mut r: Vec<C64> = d.as_slice().to_vec();
            for (q, f) in problem.systems().iter().enumerate() {
                if q == p_idx {
                    continue;
                }
                let gq = state.current.col(q);
                let fg = f.matvec(&gq);
                for (ri, fi) in r.iter_mut().zip(&fg) {
                    *ri -= fi;
                }
            }
            for n2 in 0..nn {
                let mut acc = 0.0;
                for q in 0..pp {
                    if q == p_idx {
                        continue;
                    }
                    acc += state.current.row(n2)[q].re * state.current.row(n2)[q].re;
                }
                state.b[n2] = acc;
            }
            state.residual = DenseVector::from_vec(r.clone());
            let fp = problem.system(p_idx);
            let mut gp: Vec<f64> = state.current.col(p_idx).iter().map(|z| z.re).collect();
            let mut col_prev = column_objective(fp, &r, &state.b, params.lambda, &gp);
            for _ in 0..params.max_inner {
                let gc: Vec<C64> = gp.iter().map(|&x| Complex::new(x, 0.0)).collect();
                let fg = fp.matvec(&gc);
                let diff: Vec<C64> = fg.iter().zip(&r).map(|(a, b)| a - b).collect();
                let ftd = fp.herm_matvec(&diff);
                for n2 in 0..nn {
                    state.v[n2] = ftd[n2].re - state.alpha * gp[n2];
                }
                // simultaneous scalar updates against the frozen surrogate
                for n2 in 0..nn {
                    let vn = state.v[n2];
                    let bn = state.b[n2];
                    let x0 = gp[n2];
                    let mut x = x0;
                    for _ in 0..params.max_inner {
                        let x_new = -vn
                            / (state.alpha
                                + params.lambda / (x * x + bn + params.epsilon).sqrt());
                        let step = (x_new - x).abs();
                        x = x_new;
                        if step <= params.delta * (1.0 + x.abs()) {
                            break;
                        }
                    }
                    // exact surrogate value decides acceptance, no ε here
                    let fhat = |y: f64| {
                        0.5 * state.alpha * y * y
                            + vn * y
                            + params.lambda * (y * y + bn).sqrt()
                    };
                    if fhat(x) <= fhat(x0) {
                        gp[n2] = x;
                    }
                }
                let col_now = column_objective(fp, &r, &state.b, params.lambda, &gp);
                let dropped = col_prev - col_now;
                col_prev = col_now;
                if dropped < params.delta {
                    break;
                }
            }
            for n2 in 0..nn {
                state.current.row_mut(n2)[p_idx] = Complex::new(gp[n2], 0.0);
            }
        }
        let obj_new = objective(problem, &state.current, params.lambda)?;
        let drop = obj - obj_new;
        obj = obj_new.min(obj);
        trace.push(obj);
        if drop < params.delta {
            converged = true;
            break;
        }
    }
    let selected = profile_of(&state.current, nn);
    let selection_order = ranked_rows(&state.current);
    Ok((
        state.current,
        SolveReport {
            objective_trace: trace,
            selected,
            selection_order,
            iterations,
            converged,
            wall_time_s: 0.0,
        },
    ))
}
