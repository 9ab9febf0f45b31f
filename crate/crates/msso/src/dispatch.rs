//! Algorithm registry: one name per solver, one entry point that knows
//! which solvers need a real-valued reduction or a cone adapter, and
//! fills in wall time (the core crate never touches a clock).

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use msso_core::cone::{build_socp, check_feasible, extract_solution, ConeSolverAdapter};
use msso_core::greedy::{run_lsmp, run_mp, run_omp, SolveReport};
use msso_core::model::{
    objective, profile_of, ranked_rows, solution_from_real_split, solution_from_real_stacked,
    to_real_split, to_real_stacked, MssoProblem, RelaxParams, SolutionG,
};
use msso_core::relax::{cbcs, irls, rbrs};
use msso_core::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Mp,
    Omp,
    Lsmp,
    Irls,
    Rbrs,
    Cbcs,
    Socp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Mp,
        Algorithm::Omp,
        Algorithm::Lsmp,
        Algorithm::Irls,
        Algorithm::Rbrs,
        Algorithm::Cbcs,
        Algorithm::Socp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Mp => "mp",
            Algorithm::Omp => "omp",
            Algorithm::Lsmp => "lsmp",
            Algorithm::Irls => "irls",
            Algorithm::Rbrs => "rbrs",
            Algorithm::Cbcs => "cbcs",
            Algorithm::Socp => "socp",
        }
    }

    /// Greedy pursuits take a target support size K; the rest take λ.
    pub fn is_greedy(self) -> bool {
        matches!(self, Algorithm::Mp | Algorithm::Omp | Algorithm::Lsmp)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?} (expected one of mp, omp, lsmp, irls, rbrs, cbcs, socp)"))
    }
}

pub struct SolveOptions<'a> {
    /// Target support size for the greedy pursuits.
    pub k: usize,
    /// Shrinkage weight for the relaxation solvers.
    pub lambda: f64,
    /// Cone solver behind the SOCP path; `None` leaves it unconfigured.
    pub adapter: Option<&'a (dyn ConeSolverAdapter + Send + Sync)>,
    /// Overrides the per-problem relaxation defaults when set.
    pub relax: Option<RelaxParams>,
}

impl<'a> SolveOptions<'a> {
    pub fn greedy(k: usize) -> Self {
        SolveOptions { k, lambda: 0.0, adapter: None, relax: None }
    }

    pub fn relaxed(lambda: f64) -> Self {
        SolveOptions { k: 0, lambda, adapter: None, relax: None }
    }

    fn params(&self, problem: &MssoProblem) -> RelaxParams {
        self.relax
            .clone()
            .unwrap_or_else(|| RelaxParams::defaults_for(problem, self.lambda))
    }
}

/// Runs one named algorithm on one problem. Complex inputs are reduced
/// for the real-valued shrinkage solvers and the answer mapped back;
/// both pairings preserve the objective and the row norms, so the
/// report carries over unchanged.
pub fn solve(
    alg: Algorithm,
    problem: &MssoProblem,
    opts: &SolveOptions,
) -> anyhow::Result<(SolutionG, SolveReport)> {
    let started = Instant::now();
    let (g, mut report) = match alg {
        Algorithm::Mp => run_mp(problem, opts.k)?,
        Algorithm::Omp => run_omp(problem, opts.k)?,
        Algorithm::Lsmp => run_lsmp(problem, opts.k)?,
        Algorithm::Irls => irls(problem, &opts.params(problem))?,
        Algorithm::Rbrs => {
            if problem.is_real() {
                rbrs(problem, &opts.params(problem))?
            } else {
                let reduced = to_real_stacked(problem);
                let (gr, rep) = rbrs(&reduced, &opts.params(&reduced))?;
                (solution_from_real_stacked(&gr), rep)
            }
        }
        Algorithm::Cbcs => {
            if problem.is_real() {
                cbcs(problem, &opts.params(problem))?
            } else {
                let reduced = to_real_split(problem);
                let (gr, rep) = cbcs(&reduced, &opts.params(&reduced))?;
                (solution_from_real_split(&gr), rep)
            }
        }
        Algorithm::Socp => {
            let adapter = opts.adapter.ok_or(Error::AdapterMissing)?;
            let prog = build_socp(problem, opts.lambda)?;
            let sol = adapter.solve(&prog)?;
            let g = extract_solution(&prog, &sol.x)?;
            let feas = check_feasible(&prog, &sol.x, sol.tolerance)?;
            let obj = objective(problem, &g, opts.lambda)?;
            let selected = profile_of(&g, problem.n());
            let selection_order = ranked_rows(&g);
            let report = SolveReport {
                objective_trace: vec![obj],
                selected,
                selection_order,
                iterations: 1,
                converged: feas.pass,
                wall_time_s: 0.0,
            };
            (g, report)
        }
    };
    report.wall_time_s = started.elapsed().as_secs_f64();
    Ok((g, report))
}
