//! Experiment harness: seeded trial generation, measurement noise,
//! λ-oracle sweeps, recovery tables, and scoring metrics.
//!
//! Every run is a pure function of its seed and configuration. Trials
//! derive independent sub-seeds (see [`crate::rng`]), workers never
//! share generator state, and result assembly follows the task order,
//! so identical inputs give identical tables at any worker count.

use anyhow::{bail, Context};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use msso_core::cone::ConeSolverAdapter;
use msso_core::linalg::{c, cr, C64, DenseMatrix, DenseVector};
use msso_core::model::{
    profile_of, recovery_fraction, MssoProblem, SolutionG, SparsityProfile,
};

use crate::dispatch::{solve, Algorithm, SolveOptions};
use crate::formats::ResultRow;
use crate::rng::{derive_seed, streams};

/// One experiment cell: fixed dimensions, sparsity, optional noise
/// level, and the λ grid handed to the relaxation solvers.
#[derive(Clone, Debug)]
pub struct TrialSpec {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub k: usize,
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub lambda_grid: Vec<f64>,
}

impl TrialSpec {
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.m < 1 || self.n < 1 || self.p < 1 {
            bail!("M, N, P must all be >= 1 (got M={}, N={}, P={})", self.m, self.n, self.p);
        }
        if self.k < 1 || self.k > self.n {
            bail!("K must lie in [1, N] (got K={}, N={})", self.k, self.n);
        }
        Ok(())
    }
}

/// Draws one planted instance: a uniformly random K-subset of rows,
/// standard-normal entries on those rows, standard-normal systems with
/// unit-ℓ2 columns, and d assembled exactly from the planted solution.
/// Consumes only `spec.seed`; the same spec gives the same bits.
pub fn gen_noiseless_trial(spec: &TrialSpec) -> (MssoProblem, SparsityProfile, SolutionG) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // Partial Fisher-Yates; the first K slots end up a uniform K-subset.
    let mut idx: Vec<usize> = (1..=spec.n).collect();
    for i in 0..spec.k {
        let j = i + rng.gen_range(0..spec.n - i);
        idx.swap(i, j);
    }
    let profile = SparsityProfile::new(idx[..spec.k].to_vec());

    let mut g = SolutionG::zeros(spec.n, spec.p);
    for &block in profile.indices() {
        for p in 0..spec.p {
            g.row_mut(block - 1)[p] = cr(rng.sample(StandardNormal));
        }
    }

    let mut systems = Vec::with_capacity(spec.p);
    for _ in 0..spec.p {
        let mut f = DenseMatrix::from_fn(spec.m, spec.n, |_, _| cr(rng.sample(StandardNormal)));
        for j in 0..spec.n {
            let norm = f.col(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for i in 0..spec.m {
                f[(i, j)] /= norm;
            }
        }
        systems.push(f);
    }

    let mut d = vec![C64::default(); spec.m];
    for (p, f) in systems.iter().enumerate() {
        let fg = f.matvec(&g.col(p));
        for (acc, v) in d.iter_mut().zip(fg) {
            *acc += v;
        }
    }

    let problem = MssoProblem::new(DenseVector::from_vec(d), systems)
        .expect("generated dimensions are consistent");
    (problem, profile, g)
}

/// Adds i.i.d. zero-mean Gaussian noise with per-sample variance
/// σ² = ‖d‖²/M · 10^(−SNR/10); complex inputs get circular noise with
/// the same total variance. SNR = +∞ leaves the signal bit-identical.
pub fn add_noise(d_true: &DenseVector, snr_db: f64, seed: u64) -> anyhow::Result<DenseVector> {
    let energy = d_true.norm2();
    if energy == 0.0 {
        bail!("cannot scale noise against an all-zero signal");
    }
    let m = d_true.len() as f64;
    let sigma_sq = energy * energy / m * 10f64.powf(-snr_db / 10.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let real = d_true.as_slice().iter().all(|z| z.im == 0.0);
    let out = d_true
        .as_slice()
        .iter()
        .map(|z| {
            if real {
                let w: f64 = rng.sample(StandardNormal);
                cr(z.re + sigma_sq.sqrt() * w)
            } else {
                let wr: f64 = rng.sample(StandardNormal);
                let wi: f64 = rng.sample(StandardNormal);
                let s = (sigma_sq / 2.0).sqrt();
                c(z.re + s * wr, z.im + s * wi)
            }
        })
        .collect();
    Ok(DenseVector::from_vec(out))
}

/// ‖est − truth‖_F² / (N·P).
pub fn mse(est: &SolutionG, truth: &SolutionG) -> anyhow::Result<f64> {
    if est.n() != truth.n() || est.p() != truth.p() {
        bail!(
            "solution shapes differ: {}x{} vs {}x{}",
            est.n(),
            est.p(),
            truth.n(),
            truth.p()
        );
    }
    let mut acc = 0.0;
    for n in 0..est.n() {
        for (a, b) in est.row(n).iter().zip(truth.row(n)) {
            acc += (a - b).norm_sqr();
        }
    }
    Ok(acc / (est.n() * est.p()) as f64)
}

/// Runs the solver once per grid point, scores the top-|truth| rows of
/// each answer against the truth, and keeps the best fraction seen.
pub fn lambda_oracle_sweep(
    problem: &MssoProblem,
    alg: Algorithm,
    grid: &[f64],
    truth: &SparsityProfile,
    adapter: Option<&(dyn ConeSolverAdapter + Send + Sync)>,
) -> anyhow::Result<f64> {
    if grid.is_empty() {
        bail!("lambda grid is empty");
    }
    if truth.is_empty() {
        bail!("truth profile is empty");
    }
    let k = truth.len();
    let mut best = 0.0f64;
    for &lambda in grid {
        let opts = SolveOptions { k, lambda, adapter, relax: None };
        let (g, _) = solve(alg, problem, &opts)
            .with_context(|| format!("{alg} at lambda {lambda}"))?;
        let est = profile_of(&g, k);
        best = best.max(recovery_fraction(truth, &est)?);
        if best == 1.0 {
            break;
        }
    }
    Ok(best)
}

/// Recovery score of one algorithm on one generated trial. Greedy
/// pursuits run to K selections; the rest get the λ-oracle treatment.
fn score_trial(
    cell: &TrialSpec,
    alg: Algorithm,
    trial: u64,
    cell_root: u64,
    adapter: Option<&(dyn ConeSolverAdapter + Send + Sync)>,
) -> anyhow::Result<f64> {
    let mut spec = cell.clone();
    spec.seed = derive_seed(cell_root, streams::TRIAL, trial);
    let (mut problem, truth, _planted) = gen_noiseless_trial(&spec);
    if let Some(snr) = cell.snr_db {
        let noisy = add_noise(
            problem.d(),
            snr,
            derive_seed(cell_root, streams::NOISE, trial),
        )?;
        problem = MssoProblem::new(noisy, problem.systems().to_vec())
            .expect("noise preserves dimensions");
    }
    if alg.is_greedy() {
        let (g, _) = solve(alg, &problem, &SolveOptions::greedy(cell.k))?;
        let est = profile_of(&g, cell.k);
        Ok(recovery_fraction(&truth, &est)?)
    } else {
        lambda_oracle_sweep(&problem, alg, &cell.lambda_grid, &truth, adapter)
    }
}

/// Runs every (cell, algorithm) pair over `trials` seeded trials on the
/// current rayon pool. Emits one row per trial (metric `recovery`) and
/// one mean row per pair (metric `mean_recovery`, trial = trial count).
pub fn run_recovery_experiment(
    experiment: &str,
    cells: &[TrialSpec],
    trials: u64,
    adapter: Option<&(dyn ConeSolverAdapter + Send + Sync)>,
) -> anyhow::Result<Vec<ResultRow>> {
    for cell in cells {
        cell.validate()?;
    }
    if trials == 0 {
        bail!("trial count must be >= 1");
    }

    let mut tasks = Vec::new();
    for (ci, cell) in cells.iter().enumerate() {
        for &alg in &cell.algorithms {
            for t in 0..trials {
                tasks.push((ci, alg, t));
            }
        }
    }

    let scores: Vec<anyhow::Result<f64>> = tasks
        .par_iter()
        .map(|&(ci, alg, t)| {
            let cell = &cells[ci];
            let cell_root = derive_seed(cell.seed, streams::SCENE, ci as u64);
            score_trial(cell, alg, t, cell_root, adapter)
        })
        .collect();

    let mut rows = Vec::new();
    let mut means: Vec<((usize, Algorithm), f64)> = Vec::new();
    for (&(ci, alg, t), score) in tasks.iter().zip(scores) {
        let cell = &cells[ci];
        let score = score.with_context(|| {
            format!("cell {ci} ({alg}, trial {t}, M={}, P={})", cell.m, cell.p)
        })?;
        let fixed_lambda = if alg.is_greedy() || cell.lambda_grid.len() != 1 {
            None
        } else {
            Some(cell.lambda_grid[0])
        };
        rows.push(ResultRow {
            experiment: experiment.to_string(),
            algorithm: alg.name().to_string(),
            m: cell.m,
            n: cell.n,
            p: cell.p,
            k: cell.k,
            snr_db: cell.snr_db,
            lambda: fixed_lambda,
            trial: t,
            metric_name: "recovery".to_string(),
            metric_value: score,
        });
        match means.last_mut() {
            Some((key, acc)) if *key == (ci, alg) => *acc += score,
            _ => means.push(((ci, alg), score)),
        }
    }
    for ((ci, alg), total) in means {
        let cell = &cells[ci];
        let fixed_lambda = if alg.is_greedy() || cell.lambda_grid.len() != 1 {
            None
        } else {
            Some(cell.lambda_grid[0])
        };
        rows.push(ResultRow {
            experiment: experiment.to_string(),
            algorithm: alg.name().to_string(),
            m: cell.m,
            n: cell.n,
            p: cell.p,
            k: cell.k,
            snr_db: cell.snr_db,
            lambda: fixed_lambda,
            trial: trials,
            metric_name: "mean_recovery".to_string(),
            metric_value: total / trials as f64,
        });
    }
    Ok(rows)
}

/// Uniform grid of `points` values covering [lo, hi] inclusive.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 1 && hi >= lo);
    if points == 1 {
        return vec![lo];
    }
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

/// Grid the noiseless sweep uses when nothing is configured.
pub fn default_noiseless_grid() -> Vec<f64> {
    uniform_grid(0.0, 2.0, 70)
}

/// Hand-tuned shrinkage weights for the noisy experiment, one per
/// (SNR, K) cell. These are this crate's own tuning on the generator
/// above, committed so noisy runs are reproducible without a sweep.
const NOISY_LAMBDA_TABLE: &str = include_str!("../data/noisy_lambda.csv");

pub fn noisy_lambda_for(snr_db: f64, k: usize) -> anyhow::Result<f64> {
    for (ln, line) in NOISY_LAMBDA_TABLE.lines().enumerate().skip(1) {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (s, kk, l) = (parts.next(), parts.next(), parts.next());
        let (s, kk, l) = match (s, kk, l) {
            (Some(s), Some(kk), Some(l)) => (s, kk, l),
            _ => bail!("noisy lambda table line {} is malformed", ln + 1),
        };
        let s: f64 = s.trim().parse().context("snr_db column")?;
        let kk: usize = kk.trim().parse().context("k column")?;
        let l: f64 = l.trim().parse().context("lambda column")?;
        if s == snr_db && kk == k {
            return Ok(l);
        }
    }
    bail!("no tuned lambda for SNR = {snr_db} dB, K = {k}");
}
