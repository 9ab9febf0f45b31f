//! Cone-solver adapters: the bundled interior-point solver and an
//! out-of-process bridge speaking JSON over stdin/stdout.
//!
//! The embedding side hands over programs in "variables live in cones"
//! form. The bundled solver wants `Ax + s = b, s in K`, so membership of
//! each variable block is rewritten as `-I x + s = 0` below the equality
//! rows, with a zero cone covering the equalities.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use msso_core::cone::{ConeBlock, ConeProgram, ConeSolution, ConeSolverAdapter};
use msso_core::Error;

use crate::formats::{ConeProgramFile, ConeSolutionFile};

/// Environment variable naming an external cone-solver executable.
pub const ADAPTER_ENV: &str = "MSSO_CONE_ADAPTER";

/// Conservative feasibility claim attached to returned points; the
/// solver is run tighter than this.
const REPORTED_TOL: f64 = 1e-6;

pub struct ClarabelAdapter {
    pub tol: f64,
    pub verbose: bool,
}

impl ClarabelAdapter {
    pub fn new() -> Self {
        ClarabelAdapter { tol: 1e-9, verbose: false }
    }
}

impl Default for ClarabelAdapter {
    fn default() -> Self {
        Self::new()
    }
}

impl ConeSolverAdapter for ClarabelAdapter {
    fn solve(&self, prog: &ConeProgram) -> msso_core::Result<ConeSolution> {
        let nv = prog.num_vars();
        let ne = prog.num_eqs();

        let mut rows = Vec::with_capacity(prog.a.len() + nv);
        let mut cols = Vec::with_capacity(prog.a.len() + nv);
        let mut vals = Vec::with_capacity(prog.a.len() + nv);
        for &(r, cc, v) in &prog.a {
            rows.push(r);
            cols.push(cc);
            vals.push(v);
        }
        // Membership slacks, one row per variable. The bundled solver
        // keeps the cone radius FIRST within a second-order block while
        // the embedding keeps it last, so each Soc block is rotated.
        let mut row = ne;
        let mut off = 0;
        for blk in &prog.cones {
            match blk {
                ConeBlock::NonNeg(k) => {
                    for i in 0..*k {
                        rows.push(row + i);
                        cols.push(off + i);
                        vals.push(-1.0);
                    }
                }
                ConeBlock::Soc(k) => {
                    rows.push(row);
                    cols.push(off + k - 1);
                    vals.push(-1.0);
                    for i in 0..k - 1 {
                        rows.push(row + 1 + i);
                        cols.push(off + i);
                        vals.push(-1.0);
                    }
                }
            }
            row += blk.len();
            off += blk.len();
        }
        let a = CscMatrix::new_from_triplets(ne + nv, nv, rows, cols, vals);
        let p = CscMatrix::zeros((nv, nv));

        let mut b = prog.b.clone();
        b.resize(ne + nv, 0.0);

        let mut cones = Vec::with_capacity(prog.cones.len() + 1);
        cones.push(SupportedConeT::ZeroConeT(ne));
        for blk in &prog.cones {
            cones.push(match blk {
                ConeBlock::NonNeg(k) => SupportedConeT::NonnegativeConeT(*k),
                ConeBlock::Soc(k) => SupportedConeT::SecondOrderConeT(*k),
            });
        }

        let settings = DefaultSettings {
            verbose: self.verbose,
            tol_gap_abs: self.tol,
            tol_gap_rel: self.tol,
            tol_feas: self.tol,
            ..DefaultSettings::default()
        };

        let mut solver = DefaultSolver::new(&p, &prog.c, &a, &b, &cones, settings)
            .map_err(|e| Error::AdapterFailure(format!("{e}")))?;
        solver.solve();

        let status = solver.solution.status;
        match status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => Ok(ConeSolution {
                x: solver.solution.x.clone(),
                tolerance: REPORTED_TOL,
                status: format!("{status:?}"),
            }),
            other => Err(Error::AdapterFailure(format!("cone solver stopped: {other:?}"))),
        }
    }
}

/// Runs an executable that reads a cone program as JSON on stdin and
/// writes back `{x, tolerance, status}` as JSON on stdout.
pub struct ExternalAdapter {
    command: PathBuf,
}

impl ExternalAdapter {
    pub fn new(command: impl Into<PathBuf>) -> Self {
        ExternalAdapter { command: command.into() }
    }
}

impl ConeSolverAdapter for ExternalAdapter {
    fn solve(&self, prog: &ConeProgram) -> msso_core::Result<ConeSolution> {
        let fail = |msg: String| Error::AdapterFailure(msg);
        let payload = serde_json::to_string(&ConeProgramFile::from_program(prog))
            .map_err(|e| fail(format!("encoding program: {e}")))?;

        let mut child = Command::new(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| fail(format!("spawning {}: {e}", self.command.display())))?;
        child
            .stdin
            .take()
            .ok_or_else(|| fail("no stdin handle".to_string()))?
            .write_all(payload.as_bytes())
            .map_err(|e| fail(format!("writing program: {e}")))?;
        let out = child
            .wait_with_output()
            .map_err(|e| fail(format!("waiting for solver: {e}")))?;
        if !out.status.success() {
            return Err(fail(format!(
                "{} exited with {}: {}",
                self.command.display(),
                out.status,
                String::from_utf8_lossy(&out.stderr).trim()
            )));
        }
        let sol: ConeSolutionFile = serde_json::from_slice(&out.stdout)
            .map_err(|e| fail(format!("parsing solver output: {e}")))?;
        Ok(ConeSolution { x: sol.x, tolerance: sol.tolerance, status: sol.status })
    }
}

/// Picks an adapter from an explicit request, falling back to the
/// environment. `None`/empty means unconfigured; "native"/"clarabel"
/// selects the bundled solver; anything else is an executable path.
pub fn resolve_adapter(
    requested: Option<&str>,
) -> Option<Box<dyn ConeSolverAdapter + Send + Sync>> {
    let chosen = match requested {
        Some(s) => Some(s.to_string()),
        None => std::env::var(ADAPTER_ENV).ok(),
    };
    match chosen.as_deref() {
        None | Some("") | Some("none") => None,
        Some("native") | Some("clarabel") => Some(Box::new(ClarabelAdapter::new())),
        Some(path) => Some(Box::new(ExternalAdapter::new(path))),
    }
}
