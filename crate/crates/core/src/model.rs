//! Problem representation for multiple-system single-output (MSSO)
//! simultaneous sparse approximation: d = sum_p F_p g_p with one shared
//! observation d and a common sparsity profile across the g_p.
//!
//! Two equivalent dictionary layouts are used throughout. The row view keeps
//! the P system matrices F_p; the column view regroups the same entries into
//! N blocks C_n = [f_{1,n} ... f_{P,n}] so that block n multiplies h_n, the
//! n-th row of G. Solvers pick whichever view makes their update local.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{lstsq_min_norm, C64, DenseMatrix, DenseVector};

/// One MSSO instance: d (length M) and P systems F_p (each M x N).
#[derive(Clone, Debug)]
pub struct MssoProblem {
    d: DenseVector,
    systems: Vec<DenseMatrix>,
}

impl MssoProblem {
    pub fn new(d: DenseVector, systems: Vec<DenseMatrix>) -> Result<Self> {
        let first = systems.first().ok_or(Error::EmptyOperand)?;
        if first.rows() == 0 || first.cols() == 0 || d.len() == 0 {
            return Err(Error::EmptyOperand);
        }
        if first.rows() != d.len()
            || systems.iter().any(|f| f.rows() != first.rows() || f.cols() != first.cols())
        {
            return Err(Error::DimMismatch("MssoProblem systems must share M x N with d"));
        }
        Ok(MssoProblem { d, systems })
    }

    pub fn m(&self) -> usize {
        self.d.len()
    }

    pub fn n(&self) -> usize {
        self.systems[0].cols()
    }

    pub fn p(&self) -> usize {
        self.systems.len()
    }

    pub fn d(&self) -> &DenseVector {
        &self.d
    }

    pub fn system(&self, p: usize) -> &DenseMatrix {
        &self.systems[p]
    }

    pub fn systems(&self) -> &[DenseMatrix] {
        &self.systems
    }

    pub fn is_real(&self) -> bool {
        self.d.is_real() && self.systems.iter().all(|f| f.is_real())
    }

    /// F_tot = [F_1 ... F_P] (M x PN), pairing with g_tot.
    pub fn f_tot(&self) -> DenseMatrix {
        let refs: Vec<&DenseMatrix> = self.systems.iter().collect();
        DenseMatrix::hstack(&refs).expect("systems share dimensions")
    }
}

/// Column regrouping of a problem: N blocks C_n, each M x P.
#[derive(Clone, Debug)]
pub struct ColumnView {
    blocks: Vec<DenseMatrix>,
}

impl ColumnView {
    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, n: usize) -> &DenseMatrix {
        &self.blocks[n]
    }

    pub fn blocks(&self) -> &[DenseMatrix] {
        &self.blocks
    }

    /// C_tot = [C_1 ... C_N] (M x PN), pairing with h_tot.
    pub fn stacked(&self) -> DenseMatrix {
        let refs: Vec<&DenseMatrix> = self.blocks.iter().collect();
        DenseMatrix::hstack(&refs).expect("blocks share dimensions")
    }
}

/// C_n(m, p) = F_p(m, n), exactly.
pub fn column_view(p: &MssoProblem) -> ColumnView {
    let blocks = (0..p.n())
        .map(|n| DenseMatrix::from_fn(p.m(), p.p(), |m, q| p.system(q)[(m, n)]))
        .collect();
    ColumnView { blocks }
}

/// Candidate solution: G is N x P with column p = g_p and row n = h_n.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionG {
    g: DenseMatrix,
}

impl SolutionG {
    pub fn zeros(n: usize, p: usize) -> Self {
        SolutionG { g: DenseMatrix::zeros(n, p) }
    }

    pub fn from_matrix(g: DenseMatrix) -> Self {
        SolutionG { g }
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.g
    }

    pub fn n(&self) -> usize {
        self.g.rows()
    }

    pub fn p(&self) -> usize {
        self.g.cols()
    }

    /// h_n, the shared row across systems.
    pub fn row(&self, n: usize) -> &[C64] {
        self.g.row(n)
    }

    pub fn row_mut(&mut self, n: usize) -> &mut [C64] {
        self.g.row_mut(n)
    }

    /// g_p as a plain vector.
    pub fn col(&self, p: usize) -> Vec<C64> {
        self.g.col(p)
    }

    pub fn row_norm(&self, n: usize) -> f64 {
        self.g.row(n).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn row_norms(&self) -> Vec<f64> {
        (0..self.n()).map(|n| self.row_norm(n)).collect()
    }

    /// h_tot = [h_1; ...; h_N], i.e. G flattened row-major.
    pub fn h_tot(&self) -> DenseVector {
        DenseVector::from_vec(self.g.data().to_vec())
    }

    pub fn from_h_tot(n: usize, p: usize, h: &[C64]) -> Self {
        assert_eq!(h.len(), n * p, "h_tot length");
        SolutionG { g: DenseMatrix::from_vec(n, p, h.to_vec()) }
    }

    /// g_tot = [g_1; ...; g_P], i.e. G flattened column-major.
    pub fn g_tot(&self) -> DenseVector {
        let mut out = Vec::with_capacity(self.n() * self.p());
        for p in 0..self.p() {
            for n in 0..self.n() {
                out.push(self.g[(n, p)]);
            }
        }
        DenseVector::from_vec(out)
    }

    pub fn from_g_tot(n: usize, p: usize, g: &[C64]) -> Self {
        assert_eq!(g.len(), n * p, "g_tot length");
        let mut out = DenseMatrix::zeros(n, p);
        for q in 0..p {
            for i in 0..n {
                out[(i, q)] = g[q * n + i];
            }
        }
        SolutionG { g: out }
    }

    pub fn is_real(&self) -> bool {
        self.g.is_real()
    }
}

/// Shared support of a solution. Indices are 1-based, matching how profiles
/// are reported everywhere; use [`SparsityProfile::zero_based`] for storage
/// lookups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsityProfile {
    indices: Vec<usize>,
}

impl SparsityProfile {
    /// Builds from 1-based indices; sorts and deduplicates.
    pub fn new(mut indices: Vec<usize>) -> Self {
        assert!(indices.iter().all(|&i| i >= 1), "profile indices are 1-based");
        indices.sort_unstable();
        indices.dedup();
        SparsityProfile { indices }
    }

    pub fn from_zero_based(indices: impl IntoIterator<Item = usize>) -> Self {
        Self::new(indices.into_iter().map(|i| i + 1).collect())
    }

    pub fn empty() -> Self {
        SparsityProfile { indices: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// 1-based indices, strictly increasing.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn zero_based(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().map(|&i| i - 1)
    }

    pub fn contains(&self, one_based: usize) -> bool {
        self.indices.binary_search(&one_based).is_ok()
    }
}

/// Iteration controls shared by the relaxation solvers (IRLS, RBRS, CBCS).
///
/// `epsilon` guards divisions by vanishing row norms, `delta` is the
/// objective-decrease stopping threshold, `max_outer` caps outer iterations
/// and `max_inner` caps the per-row / per-column / per-element inner loops
/// (IRLS has no inner loop of its own; its inner solve is LSQR).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelaxParams {
    pub lambda: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub max_outer: usize,
    pub max_inner: usize,
}

impl RelaxParams {
    /// Defaults for a given problem: epsilon scales with ‖d‖ so the guard
    /// stays meaningful across data magnitudes.
    pub fn defaults_for(p: &MssoProblem, lambda: f64) -> Self {
        RelaxParams {
            lambda,
            epsilon: 1e-8 * (1.0 + p.d().norm2()),
            delta: 1e-5,
            max_outer: 500,
            max_inner: 100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda < 0.0 || !self.lambda.is_finite() {
            return Err(Error::InvalidParam("lambda must be nonnegative"));
        }
        if self.epsilon <= 0.0 {
            return Err(Error::InvalidParam("epsilon must be positive"));
        }
        if self.delta <= 0.0 {
            return Err(Error::InvalidParam("delta must be positive"));
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(Error::InvalidParam("iteration caps must be at least 1"));
        }
        Ok(())
    }
}

/// Simultaneous-sparsity norm: the ℓ1 norm of the ℓ2 norms of the rows of G.
pub fn s_norm(g: &SolutionG) -> f64 {
    (0..g.n()).map(|n| g.row_norm(n)).sum()
}

/// d − Σ_p F_p g_p.
pub fn residual(p: &MssoProblem, g: &SolutionG) -> Result<DenseVector> {
    if g.n() != p.n() || g.p() != p.p() {
        return Err(Error::DimMismatch("residual: G must be N x P"));
    }
    let mut r: Vec<C64> = p.d().as_slice().to_vec();
    for q in 0..p.p() {
        let f = p.system(q);
        for i in 0..p.m() {
            let mut acc = Complex::new(0.0, 0.0);
            for (a, x) in f.row(i).iter().zip((0..p.n()).map(|n| g.matrix()[(n, q)])) {
                acc += a * x;
            }
            r[i] -= acc;
        }
    }
    Ok(DenseVector::from_vec(r))
}

/// Relaxed objective ½‖d − Σ_p F_p g_p‖₂² + λ·s_norm(G).
pub fn objective(p: &MssoProblem, g: &SolutionG, lambda: f64) -> Result<f64> {
    let r = residual(p, g)?;
    let rn = r.norm2();
    Ok(0.5 * rn * rn + lambda * s_norm(g))
}

/// One-based indices of the nonzero rows ordered by decreasing ℓ2 energy;
/// ties go to the lowest index.
pub fn ranked_rows(g: &SolutionG) -> Vec<usize> {
    let norms = g.row_norms();
    let mut order: Vec<usize> = (0..g.n()).filter(|&i| norms[i] > 0.0).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));
    order.into_iter().map(|i| i + 1).collect()
}

/// Indices of the K rows with largest ℓ2 energy; exactly-zero rows are never
/// included, so the result may hold fewer than K indices. Ties go to the
/// lowest index.
pub fn profile_of(g: &SolutionG, k: usize) -> SparsityProfile {
    assert!(k >= 1 && k <= g.n(), "profile_of: K must lie in [1, N]");
    SparsityProfile::new(ranked_rows(g).into_iter().take(k).collect())
}

/// |truth ∩ estimate| / |truth|.
pub fn recovery_fraction(truth: &SparsityProfile, estimate: &SparsityProfile) -> Result<f64> {
    if truth.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let hit = truth.indices().iter().filter(|i| estimate.contains(**i)).count();
    Ok(hit as f64 / truth.len() as f64)
}

/// Least-squares refit on a fixed profile: rows outside the profile are set
/// to exactly zero, rows inside hold the minimum-norm solve of d against the
/// stacked blocks [C_{q1} ... C_{qK}].
pub fn retune(p: &MssoProblem, profile: &SparsityProfile) -> Result<SolutionG> {
    if profile.is_empty() {
        return Err(Error::EmptyProfile);
    }
    if profile.indices().last().copied().unwrap_or(0) > p.n() {
        return Err(Error::DimMismatch("retune: profile index exceeds N"));
    }
    let view = column_view(p);
    let blocks: Vec<&DenseMatrix> = profile.zero_based().map(|n| view.block(n)).collect();
    let stacked = DenseMatrix::hstack(&blocks)?;
    let x = lstsq_min_norm(&stacked, p.d())?;
    let mut g = SolutionG::zeros(p.n(), p.p());
    for (slot, n) in profile.zero_based().enumerate() {
        let seg = &x.as_slice()[slot * p.p()..(slot + 1) * p.p()];
        g.row_mut(n).copy_from_slice(seg);
    }
    Ok(g)
}

/// Complex → real reduction that stacks Re over Im and doubles the block
/// width: d~ = [Re d; Im d], C~_n = [[Re C_n, −Im C_n],[Im C_n, Re C_n]].
/// As systems the result is ordered [A_1..A_P, B_1..B_P] with
/// A_p = [Re F_p; Im F_p] and B_p = [−Im F_p; Re F_p]. Rows pair as
/// h~_n = [Re h_n; Im h_n], which leaves both the residual norm and the
/// row-norm sum unchanged.
pub fn to_real_stacked(p: &MssoProblem) -> MssoProblem {
    let d = stack_re_im(p.d());
    let mut systems = Vec::with_capacity(2 * p.p());
    for q in 0..p.p() {
        systems.push(real_block(p.system(q), false));
    }
    for q in 0..p.p() {
        systems.push(real_block(p.system(q), true));
    }
    MssoProblem::new(d, systems).expect("reduction preserves validity")
}

/// Complex → real reduction that splits each system into a real pair,
/// ordered [A_1, B_1, ..., A_P, B_P]; rows pair as
/// [Re g_1[n], Im g_1[n], ..., Re g_P[n], Im g_P[n]].
pub fn to_real_split(p: &MssoProblem) -> MssoProblem {
    let d = stack_re_im(p.d());
    let mut systems = Vec::with_capacity(2 * p.p());
    for q in 0..p.p() {
        systems.push(real_block(p.system(q), false));
        systems.push(real_block(p.system(q), true));
    }
    MssoProblem::new(d, systems).expect("reduction preserves validity")
}

/// A single complex sparse system d ≈ F g recast as a real MSSO problem with
/// P = 2: the real and imaginary parts of g become two simultaneously sparse
/// real unknowns, and s_norm of the pair equals Σ_n |g[n]|.
pub fn complex_sparse_as_msso(f: &DenseMatrix, d: &DenseVector) -> Result<MssoProblem> {
    let p = MssoProblem::new(d.clone(), vec![f.clone()])?;
    Ok(to_real_split(&p))
}

fn stack_re_im(d: &DenseVector) -> DenseVector {
    let mut out = Vec::with_capacity(2 * d.len());
    out.extend(d.as_slice().iter().map(|z| Complex::new(z.re, 0.0)));
    out.extend(d.as_slice().iter().map(|z| Complex::new(z.im, 0.0)));
    DenseVector::from_vec(out)
}

/// [Re F; Im F] or, when `rotated`, [−Im F; Re F].
fn real_block(f: &DenseMatrix, rotated: bool) -> DenseMatrix {
    let m = f.rows();
    DenseMatrix::from_fn(2 * m, f.cols(), |i, j| {
        let z = f[(i % m, j)];
        let v = match (i < m, rotated) {
            (true, false) => z.re,
            (false, false) => z.im,
            (true, true) => -z.im,
            (false, true) => z.re,
        };
        Complex::new(v, 0.0)
    })
}

/// Pairing G → G~ for [`to_real_stacked`]: G~(n, p) = Re G(n, p),
/// G~(n, P+p) = Im G(n, p).
pub fn solution_to_real_stacked(g: &SolutionG) -> SolutionG {
    let (n, p) = (g.n(), g.p());
    SolutionG::from_matrix(DenseMatrix::from_fn(n, 2 * p, |i, j| {
        let z = g.matrix()[(i, j % p)];
        Complex::new(if j < p { z.re } else { z.im }, 0.0)
    }))
}

/// Inverse pairing for [`to_real_stacked`] solutions.
pub fn solution_from_real_stacked(g: &SolutionG) -> SolutionG {
    assert!(g.p() % 2 == 0, "stacked real solution must have even P");
    let p = g.p() / 2;
    SolutionG::from_matrix(DenseMatrix::from_fn(g.n(), p, |i, j| {
        Complex::new(g.matrix()[(i, j)].re, g.matrix()[(i, p + j)].re)
    }))
}

/// Pairing G → G~ for [`to_real_split`]: G~(n, 2p) = Re G(n, p),
/// G~(n, 2p+1) = Im G(n, p).
pub fn solution_to_real_split(g: &SolutionG) -> SolutionG {
    let (n, p) = (g.n(), g.p());
    SolutionG::from_matrix(DenseMatrix::from_fn(n, 2 * p, |i, j| {
        let z = g.matrix()[(i, j / 2)];
        Complex::new(if j % 2 == 0 { z.re } else { z.im }, 0.0)
    }))
}

/// Inverse pairing for [`to_real_split`] solutions.
pub fn solution_from_real_split(g: &SolutionG) -> SolutionG {
    assert!(g.p() % 2 == 0, "split real solution must have even P");
    let p = g.p() / 2;
    SolutionG::from_matrix(DenseMatrix::from_fn(g.n(), p, |i, j| {
        Complex::new(g.matrix()[(i, 2 * j)].re, g.matrix()[(i, 2 * j + 1)].re)
    }))
}
