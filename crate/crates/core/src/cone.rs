//! Second-order cone embedding of the penalized objective.
//!
//! The relaxed problem min ½‖d − Σ_p F_p g_p‖² + λΣ_n‖h_n‖ becomes the
//! standard-form program
//!
//! ```text
//!   min cᵀx   s.t.  Ax = b,  x ∈ K
//! ```
//!
//! with one scalar epigraph variable s for the squared residual, one
//! epigraph variable t_n per row of G, the residual copy z, and the two
//! affine helpers u = (s−1)/2, v = (s+1)/2 that express ‖z‖² ≤ s as the
//! cone ‖[z, u]‖ ≤ v. Complex problems split every complex quantity into
//! interleaved (Re, Im) pairs. The interior-point solve itself is left to
//! an adapter behind [`ConeSolverAdapter`]; everything here is the exact,
//! solver-independent encoding plus its feasibility and consistency
//! checks.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{residual, MssoProblem, SolutionG};

/// One block of the cone product K, in variable order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeBlock {
    /// Nonnegative orthant of the given dimension.
    NonNeg(usize),
    /// Second-order cone: the last entry bounds the norm of the rest.
    Soc(usize),
}

impl ConeBlock {
    pub fn len(&self) -> usize {
        match self {
            ConeBlock::NonNeg(k) | ConeBlock::Soc(k) => *k,
        }
    }
}

/// Index map into the variable vector. Layout, fixed for serialization
/// stability: x = [s | z u v | g-row 1, t_1 | ... | g-row N, t_N] with the
/// g entries of row n ordered Re g_1[n], (Im g_1[n],) ..., Re g_P[n],
/// (Im g_P[n]); imaginary slots exist only when `real` is false.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VariableMap {
    /// Problem was real-valued; no imaginary slots anywhere.
    pub real: bool,
    pub m: usize,
    pub n: usize,
    pub p: usize,
}

impl VariableMap {
    /// Real equation/entry count backing one complex dimension.
    fn expand(&self) -> usize {
        if self.real {
            1
        } else {
            2
        }
    }

    /// Length of the residual copy z.
    pub fn z_len(&self) -> usize {
        self.expand() * self.m
    }

    /// Number of g entries inside one row cone.
    pub fn row_span(&self) -> usize {
        self.expand() * self.p
    }

    pub fn s(&self) -> usize {
        0
    }

    pub fn z_start(&self) -> usize {
        1
    }

    pub fn u(&self) -> usize {
        1 + self.z_len()
    }

    pub fn v(&self) -> usize {
        2 + self.z_len()
    }

    /// First entry of row n's cone block, 0-based n.
    pub fn row_start(&self, n: usize) -> usize {
        3 + self.z_len() + n * (self.row_span() + 1)
    }

    pub fn t(&self, n: usize) -> usize {
        self.row_start(n) + self.row_span()
    }

    pub fn g_re(&self, n: usize, p: usize) -> usize {
        self.row_start(n) + self.expand() * p
    }

    /// Imaginary slot of g_p[n]; `None` for real programs.
    pub fn g_im(&self, n: usize, p: usize) -> Option<usize> {
        if self.real {
            None
        } else {
            Some(self.row_start(n) + 2 * p + 1)
        }
    }

    /// Total variable count.
    pub fn len(&self) -> usize {
        3 + self.z_len() + self.n * (self.row_span() + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Standard-form cone program: min cᵀx s.t. Ax = b, x ∈ K. A is kept as
/// (row, col, value) triplets in deterministic row-major emission order;
/// zero coefficients are never stored.
#[derive(Clone, Debug)]
pub struct ConeProgram {
    pub c: Vec<f64>,
    pub a: Vec<(usize, usize, f64)>,
    pub b: Vec<f64>,
    pub cones: Vec<ConeBlock>,
    pub vars: VariableMap,
}

impl ConeProgram {
    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_eqs(&self) -> usize {
        self.b.len()
    }

    /// b − Ax.
    pub fn eq_residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.b.clone();
        for &(i, j, val) in &self.a {
            r[i] -= val * x[j];
        }
        r
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(ci, xi)| ci * xi).sum()
    }
}

/// Feasibility summary for a candidate variable vector. Cone margins are
/// ‖head‖ − tail for second-order blocks and the largest negative entry
/// for orthant blocks; feasible points have margins ≤ 0.
#[derive(Clone, Copy, Debug)]
pub struct FeasibilityReport {
    pub max_eq_violation: f64,
    pub worst_cone_margin: f64,
    /// Index into `cones` of the block attaining the worst margin.
    pub worst_cone: usize,
    pub pass: bool,
}

/// Encodes the problem at the given λ. Row cones are emitted in row order
/// after the orthant block and the residual cone, so cone index 2 + n
/// belongs to row n.
pub fn build_socp(problem: &MssoProblem, lambda: f64) -> Result<ConeProgram> {
    if lambda < 0.0 {
        return Err(Error::InvalidParam("lambda must be nonnegative"));
    }
    let vars = VariableMap {
        real: problem.is_real(),
        m: problem.m(),
        n: problem.n(),
        p: problem.p(),
    };
    let zl = vars.z_len();

    let mut c = vec![0.0; vars.len()];
    c[vars.s()] = 0.5;
    for n in 0..vars.n {
        c[vars.t(n)] = lambda;
    }

    let mut a: Vec<(usize, usize, f64)> = Vec::new();
    let mut b = vec![0.0; zl + 2];

    // z + F_tot g = d, one real equation per expanded residual entry.
    for i in 0..problem.m() {
        if vars.real {
            a.push((i, vars.z_start() + i, 1.0));
            for p in 0..vars.p {
                let f = problem.system(p);
                for n in 0..vars.n {
                    let fv = f[(i, n)].re;
                    if fv != 0.0 {
                        a.push((i, vars.g_re(n, p), fv));
                    }
                }
            }
            b[i] = problem.d().as_slice()[i].re;
        } else {
            let (re_row, im_row) = (2 * i, 2 * i + 1);
            a.push((re_row, vars.z_start() + 2 * i, 1.0));
            a.push((im_row, vars.z_start() + 2 * i + 1, 1.0));
            for p in 0..vars.p {
                let f = problem.system(p);
                for n in 0..vars.n {
                    let fv = f[(i, n)];
                    let gi = vars.g_im(n, p).unwrap();
                    if fv.re != 0.0 {
                        a.push((re_row, vars.g_re(n, p), fv.re));
                        a.push((im_row, gi, fv.re));
                    }
                    if fv.im != 0.0 {
                        a.push((re_row, gi, -fv.im));
                        a.push((im_row, vars.g_re(n, p), fv.im));
                    }
                }
            }
            let dv = problem.d().as_slice()[i];
            b[re_row] = dv.re;
            b[im_row] = dv.im;
        }
    }
    // u − s/2 = −1/2 and v − s/2 = 1/2 pin the rotated-cone helpers.
    a.push((zl, vars.u(), 1.0));
    a.push((zl, vars.s(), -0.5));
    b[zl] = -0.5;
    a.push((zl + 1, vars.v(), 1.0));
    a.push((zl + 1, vars.s(), -0.5));
    b[zl + 1] = 0.5;

    let mut cones = Vec::with_capacity(2 + vars.n);
    cones.push(ConeBlock::NonNeg(1));
    cones.push(ConeBlock::Soc(zl + 2));
    for _ in 0..vars.n {
        cones.push(ConeBlock::Soc(vars.row_span() + 1));
    }

    Ok(ConeProgram { c, a, b, cones, vars })
}

/// Lifts a solution G into the program's variable vector with exact
/// auxiliaries: z is the residual, s = ‖z‖², u = (s−1)/2, v = (s+1)/2,
/// t_n the row norms. The result is primal-feasible by construction.
pub fn embed_point(problem: &MssoProblem, g: &SolutionG) -> Result<Vec<f64>> {
    let vars = VariableMap {
        real: problem.is_real(),
        m: problem.m(),
        n: problem.n(),
        p: problem.p(),
    };
    let r = residual(problem, g)?;
    let mut x = vec![0.0; vars.len()];
    for (i, ri) in r.as_slice().iter().enumerate() {
        if vars.real {
            x[vars.z_start() + i] = ri.re;
        } else {
            x[vars.z_start() + 2 * i] = ri.re;
            x[vars.z_start() + 2 * i + 1] = ri.im;
        }
    }
    let s: f64 = x[vars.z_start()..vars.z_start() + vars.z_len()]
        .iter()
        .map(|zi| zi * zi)
        .sum();
    x[vars.s()] = s;
    x[vars.u()] = (s - 1.0) / 2.0;
    x[vars.v()] = (s + 1.0) / 2.0;
    for n in 0..vars.n {
        for p in 0..vars.p {
            let gv = g.matrix()[(n, p)];
            x[vars.g_re(n, p)] = gv.re;
            if let Some(gi) = vars.g_im(n, p) {
                x[gi] = gv.im;
            }
        }
        x[vars.t(n)] = g.row_norm(n);
    }
    Ok(x)
}

/// Reads G back out of a variable vector. Inverse of the g part of
/// [`embed_point`]: extract(embed(G)) reproduces G bit for bit.
pub fn extract_solution(prog: &ConeProgram, x: &[f64]) -> Result<SolutionG> {
    if x.len() != prog.num_vars() {
        return Err(Error::DimMismatch("extract_solution"));
    }
    let vars = &prog.vars;
    let mut g = SolutionG::zeros(vars.n, vars.p);
    for n in 0..vars.n {
        for p in 0..vars.p {
            let re = x[vars.g_re(n, p)];
            let im = vars.g_im(n, p).map_or(0.0, |gi| x[gi]);
            g.row_mut(n)[p] = Complex::new(re, im);
        }
    }
    Ok(g)
}

/// Checks Ax = b and every cone membership. Passes when both the largest
/// equality violation and the worst cone margin stay within tol.
pub fn check_feasible(prog: &ConeProgram, x: &[f64], tol: f64) -> Result<FeasibilityReport> {
    if x.len() != prog.num_vars() {
        return Err(Error::DimMismatch("check_feasible"));
    }
    if tol < 0.0 {
        return Err(Error::InvalidParam("tol must be nonnegative"));
    }
    let max_eq_violation = prog
        .eq_residual(x)
        .iter()
        .fold(0.0_f64, |acc, ri| acc.max(ri.abs()));
    let mut worst_cone_margin = f64::NEG_INFINITY;
    let mut worst_cone = 0;
    let mut off = 0;
    for (idx, cone) in prog.cones.iter().enumerate() {
        let block = &x[off..off + cone.len()];
        let margin = match cone {
            ConeBlock::NonNeg(_) => block.iter().fold(f64::NEG_INFINITY, |acc, xi| acc.max(-xi)),
            ConeBlock::Soc(k) => {
                let head: f64 = block[..k - 1].iter().map(|xi| xi * xi).sum();
                head.sqrt() - block[k - 1]
            }
        };
        if margin > worst_cone_margin {
            worst_cone_margin = margin;
            worst_cone = idx;
        }
        off += cone.len();
    }
    Ok(FeasibilityReport {
        max_eq_violation,
        worst_cone_margin,
        worst_cone,
        pass: max_eq_violation <= tol && worst_cone_margin <= tol,
    })
}

/// A solved variable vector plus the tolerance the solver certifies it to.
#[derive(Clone, Debug)]
pub struct ConeSolution {
    pub x: Vec<f64>,
    /// Primal feasibility tolerance the producing solver worked to.
    pub tolerance: f64,
    /// Free-form status line from the solver, for reports.
    pub status: String,
}

/// Invocation contract for an interior-point back end. Implementations
/// return a primal-feasible point for the given program or an
/// [`Error::AdapterFailure`] describing why none is available.
pub trait ConeSolverAdapter {
    fn solve(&self, prog: &ConeProgram) -> Result<ConeSolution>;
}
