//! File formats: problem fixtures, solve reports, cone programs for
//! out-of-process solvers, result tables, and run manifests.
//!
//! Problems travel as JSON with every complex entry written as an
//! `[re, im]` pair; system matrices are row-major. Result tables use a
//! fixed CSV column order so identical runs produce identical bytes.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use msso_core::cone::{ConeBlock, ConeProgram, VariableMap};
use msso_core::greedy::SolveReport;
use msso_core::linalg::{c, C64, DenseMatrix, DenseVector};
use msso_core::model::{MssoProblem, SolutionG};

/// On-disk problem: dimensions plus (re, im) pairs; `systems[p]` is the
/// row-major M×N matrix F_p.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ProblemFile {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub d: Vec<[f64; 2]>,
    pub systems: Vec<Vec<[f64; 2]>>,
}

impl ProblemFile {
    pub fn from_problem(p: &MssoProblem) -> Self {
        ProblemFile {
            m: p.m(),
            n: p.n(),
            p: p.p(),
            d: p.d().as_slice().iter().map(|z| [z.re, z.im]).collect(),
            systems: p
                .systems()
                .iter()
                .map(|f| {
                    (0..f.rows())
                        .flat_map(|i| (0..f.cols()).map(move |j| (i, j)))
                        .map(|(i, j)| [f[(i, j)].re, f[(i, j)].im])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_problem(&self) -> anyhow::Result<MssoProblem> {
        if self.d.len() != self.m {
            bail!("field d: expected {} entries, found {}", self.m, self.d.len());
        }
        if self.systems.len() != self.p {
            bail!(
                "field systems: expected {} matrices, found {}",
                self.p,
                self.systems.len()
            );
        }
        let mut mats = Vec::with_capacity(self.p);
        for (idx, flat) in self.systems.iter().enumerate() {
            if flat.len() != self.m * self.n {
                bail!(
                    "field systems[{idx}]: expected {}x{} = {} entries, found {}",
                    self.m,
                    self.n,
                    self.m * self.n,
                    flat.len()
                );
            }
            let data: Vec<C64> = flat.iter().map(|&[re, im]| c(re, im)).collect();
            mats.push(DenseMatrix::from_vec(self.m, self.n, data));
        }
        let d = DenseVector::from_vec(
            self.d.iter().map(|&[re, im]| c(re, im)).collect(),
        );
        MssoProblem::new(d, mats).map_err(|e| anyhow::anyhow!("invalid problem: {e}"))
    }
}

pub fn read_problem(path: &Path) -> anyhow::Result<MssoProblem> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading problem file {}", path.display()))?;
    let file: ProblemFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing problem file {}", path.display()))?;
    file.to_problem()
}

pub fn write_problem(path: &Path, p: &MssoProblem) -> anyhow::Result<()> {
    let file = ProblemFile::from_problem(p);
    fs::write(path, serde_json::to_string_pretty(&file)?)
        .with_context(|| format!("writing problem file {}", path.display()))?;
    Ok(())
}

/// Solve report plus the context a reader needs to interpret it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub algorithm: String,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time_s: f64,
    /// 1-based selected row indices.
    pub selected: Vec<usize>,
}

impl ReportFile {
    pub fn new(algorithm: &str, report: &SolveReport) -> Self {
        ReportFile {
            algorithm: algorithm.to_string(),
            objective_trace: report.objective_trace.clone(),
            iterations: report.iterations,
            converged: report.converged,
            wall_time_s: report.wall_time_s,
            selected: report.selected.indices().to_vec(),
        }
    }
}

/// Complex solution matrix as CSV: one line per row n with paired
/// re/im columns per system.
pub fn solution_to_csv(g: &SolutionG) -> String {
    let mut out = String::from("row");
    for p in 1..=g.p() {
        out.push_str(&format!(",re_{p},im_{p}"));
    }
    out.push('\n');
    for n in 0..g.n() {
        out.push_str(&format!("{}", n + 1));
        for p in 0..g.p() {
            let z = g.row(n)[p];
            out.push_str(&format!(",{:.17e},{:.17e}", z.re, z.im));
        }
        out.push('\n');
    }
    out
}

/// Cone program in transferable form; `a` holds (row, col, value)
/// triplets of the equality matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConeProgramFile {
    pub num_vars: usize,
    pub c: Vec<f64>,
    pub a: Vec<(usize, usize, f64)>,
    pub b: Vec<f64>,
    /// (kind, dim) with kind "nonneg" or "soc", in variable order.
    pub cones: Vec<(String, usize)>,
    pub real: bool,
    pub m: usize,
    pub n: usize,
    pub p: usize,
}

impl ConeProgramFile {
    pub fn from_program(prog: &ConeProgram) -> Self {
        ConeProgramFile {
            num_vars: prog.num_vars(),
            c: prog.c.clone(),
            a: prog.a.clone(),
            b: prog.b.clone(),
            cones: prog
                .cones
                .iter()
                .map(|c| match c {
                    ConeBlock::NonNeg(k) => ("nonneg".to_string(), *k),
                    ConeBlock::Soc(k) => ("soc".to_string(), *k),
                })
                .collect(),
            real: prog.vars.real,
            m: prog.vars.m,
            n: prog.vars.n,
            p: prog.vars.p,
        }
    }

    pub fn to_program(&self) -> anyhow::Result<ConeProgram> {
        let mut cones = Vec::with_capacity(self.cones.len());
        for (kind, dim) in &self.cones {
            match kind.as_str() {
                "nonneg" => cones.push(ConeBlock::NonNeg(*dim)),
                "soc" => cones.push(ConeBlock::Soc(*dim)),
                other => bail!("unknown cone kind {other:?}"),
            }
        }
        let prog = ConeProgram {
            c: self.c.clone(),
            a: self.a.clone(),
            b: self.b.clone(),
            cones,
            vars: VariableMap {
                real: self.real,
                m: self.m,
                n: self.n,
                p: self.p,
            },
        };
        if prog.num_vars() != self.num_vars {
            bail!(
                "cone program dimensions disagree: vars say {}, file says {}",
                prog.num_vars(),
                self.num_vars
            );
        }
        Ok(prog)
    }
}

/// What an out-of-process cone solver writes back.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConeSolutionFile {
    pub x: Vec<f64>,
    pub tolerance: f64,
    pub status: String,
}

/// One metric observation. Field order is the CSV column order.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub algorithm: String,
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub k: usize,
    pub snr_db: Option<f64>,
    pub lambda: Option<f64>,
    pub trial: u64,
    pub metric_name: String,
    pub metric_value: f64,
}

/// Sort key that fixes output order regardless of worker scheduling.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        (
            &a.experiment,
            a.m,
            a.p,
            a.k,
            a.snr_db.map(f64::to_bits),
            &a.algorithm,
            a.trial,
            &a.metric_name,
            a.lambda.map(f64::to_bits),
        )
            .cmp(&(
                &b.experiment,
                b.m,
                b.p,
                b.k,
                b.snr_db.map(f64::to_bits),
                &b.algorithm,
                b.trial,
                &b.metric_name,
                b.lambda.map(f64::to_bits),
            ))
    });
}

pub fn results_to_csv(rows: &[ResultRow]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "experiment",
        "algorithm",
        "M",
        "N",
        "P",
        "K",
        "snr_db",
        "lambda",
        "trial",
        "metric_name",
        "metric_value",
    ])?;
    for r in rows {
        w.write_record([
            r.experiment.clone(),
            r.algorithm.clone(),
            r.m.to_string(),
            r.n.to_string(),
            r.p.to_string(),
            r.k.to_string(),
            r.snr_db.map(|v| format!("{v}")).unwrap_or_default(),
            r.lambda.map(|v| format!("{v:.17e}")).unwrap_or_default(),
            r.trial.to_string(),
            r.metric_name.clone(),
            format!("{:.17e}", r.metric_value),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> anyhow::Result<()> {
    fs::write(path, results_to_csv(rows)?)
        .with_context(|| format!("writing results {}", path.display()))?;
    Ok(())
}

/// Run provenance written next to every result table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: String,
    pub seed: u64,
    pub jobs: usize,
    pub version: String,
    /// Echo of the effective configuration after flag/file merging.
    pub config: serde_json::Value,
}

impl RunManifest {
    pub fn new(experiment: &str, seed: u64, jobs: usize, config: serde_json::Value) -> Self {
        RunManifest {
            experiment: experiment.to_string(),
            seed,
            jobs,
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
        }
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let mut f = fs::File::create(path)
            .with_context(|| format!("writing manifest {}", path.display()))?;
        writeln!(f, "{}", serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}
