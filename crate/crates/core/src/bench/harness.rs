use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{BenchError, ExperimentSpec, Grouping, VariantEntry};
use crate::model::{build_difference_operator, mse, SignalVector};
use crate::sensing::{derive_seed, generate_measurement_matrix, make_test_signal, sense, substream, SensingConfig};
use crate::solvers::{factorize_sgf, LgfSolver, LinearSystemFactor, SgfSolver, SolveReport};

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub variant: String,
    pub mu: f64,
    pub trial: usize,
    /// Per-cell seed the measurement matrix and noise were derived from.
    pub seed: u64,
    pub mse: f64,
    pub iterations: usize,
    pub converged: bool,
    pub duration: Duration,
}

#[derive(Debug, Clone)]
pub struct VariantRun {
    pub report: SolveReport,
    pub result: TrialResult,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub x_true: SignalVector,
    pub mu: f64,
    pub seed: u64,
    pub runs: Vec<VariantRun>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub variant: String,
    pub mu: f64,
    pub mean_mse: f64,
    /// Standard error of the mean; zero for a single trial.
    pub stderr_mse: f64,
    pub mean_iters: f64,
    pub trials: usize,
}

#[derive(Debug, Clone)]
pub struct Sweep {
    /// Ordered by variant (configuration order), then `mu`.
    pub cells: Vec<SweepCell>,
    /// Ordered by variant, `mu`, trial.
    pub trials: Vec<TrialResult>,
}

impl Sweep {
    pub fn cell(&self, variant: &str, mu: f64) -> Option<&SweepCell> {
        self.cells.iter().find(|c| c.variant == variant && c.mu == mu)
    }
}

/// One sensing realisation shared by every variant of a `(mu, trial)` cell.
struct Realisation {
    seed: u64,
    phi: DMatrix<f64>,
    y: DVector<f64>,
}

fn realise(spec: &ExperimentSpec, x: &SignalVector, mu: f64, trial: usize) -> Result<Realisation, BenchError> {
    let seed = derive_seed(spec.sensing.seed, trial as u64, mu);
    let cfg = SensingConfig { mu, seed: substream(seed, 0), ..spec.sensing };
    let phi = generate_measurement_matrix(&cfg).map_err(|e| BenchError::validation("sensing", e))?;
    let y = sense(&phi, x, spec.sensing.sigma2, substream(seed, 1))
        .map_err(|e| BenchError::validation("sensing", e))?;
    Ok(Realisation { seed, phi, y })
}

fn solve_all(
    spec: &ExperimentSpec,
    x: &SignalVector,
    real: &Realisation,
    mu: f64,
    trial: usize,
) -> Result<Vec<VariantRun>, BenchError> {
    // every disjoint-group variant shares one x-update factor
    let mut sgf_factor: Option<Arc<LinearSystemFactor>> = None;
    spec.variants
        .iter()
        .map(|entry| {
            let fail = |source| BenchError::Solver { variant: entry.name.clone(), source };
            let start = Instant::now();
            let report = match &entry.grouping {
                Grouping::Disjoint(partition) => {
                    let factor = match &sgf_factor {
                        Some(f) => f.clone(),
                        None => {
                            let d = build_difference_operator(real.phi.ncols()).map_err(fail)?;
                            let f = Arc::new(factorize_sgf(&real.phi, &d, &spec.admm).map_err(fail)?);
                            sgf_factor = Some(f.clone());
                            f
                        }
                    };
                    SgfSolver::with_factor(&real.phi, partition, entry.penalties, spec.admm, factor)
                        .and_then(|s| s.solve(&real.y, None))
                }
                Grouping::Latent(layout) => LgfSolver::new(&real.phi, layout, entry.penalties, spec.admm)
                    .and_then(|s| s.solve(&real.y, None)),
            }
            .map_err(fail)?;
            let duration = start.elapsed();
            Ok(VariantRun {
                result: trial_result(entry, x, &report, mu, trial, real.seed, duration)?,
                report,
            })
        })
        .collect()
}

fn trial_result(
    entry: &VariantEntry,
    x: &SignalVector,
    report: &SolveReport,
    mu: f64,
    trial: usize,
    seed: u64,
    duration: Duration,
) -> Result<TrialResult, BenchError> {
    Ok(TrialResult {
        variant: entry.name.clone(),
        mu,
        trial,
        seed,
        mse: mse(x, report.x()).map_err(|source| BenchError::Solver { variant: entry.name.clone(), source })?,
        iterations: report.iterations,
        converged: report.converged,
        duration,
    })
}

fn test_signal(spec: &ExperimentSpec) -> Result<SignalVector, BenchError> {
    make_test_signal(&spec.signal).map_err(|e| BenchError::validation("signal", e))
}

/// Every variant on one realisation at `spec.sensing.mu` (trial 0).
pub fn run_reconstruction(spec: &ExperimentSpec) -> Result<Reconstruction, BenchError> {
    let x = test_signal(spec)?;
    let mu = spec.sensing.mu;
    let real = realise(spec, &x, mu, 0)?;
    let runs = solve_all(spec, &x, &real, mu, 0)?;
    Ok(Reconstruction { x_true: x, mu, seed: real.seed, runs })
}

/// Mean MSE per `(variant, mu)` over `spec.trials` fresh realisations.
/// Cells run in parallel; results are sorted before aggregation.
pub fn run_mse_sweep(spec: &ExperimentSpec) -> Result<Sweep, BenchError> {
    let x = test_signal(spec)?;
    let work: Vec<(usize, usize)> = (0..spec.mu_grid.len())
        .flat_map(|m| (0..spec.trials).map(move |t| (m, t)))
        .collect();
    let per_cell: Vec<Vec<TrialResult>> = work
        .par_iter()
        .map(|&(m, t)| {
            let mu = spec.mu_grid[m];
            let real = realise(spec, &x, mu, t)?;
            Ok(solve_all(spec, &x, &real, mu, t)?.into_iter().map(|r| r.result).collect())
        })
        .collect::<Result<_, BenchError>>()?;

    let order = |r: &TrialResult| {
        let v = spec.variant_index(&r.variant).unwrap_or(usize::MAX);
        let m = spec.mu_grid.iter().position(|&mu| mu == r.mu).unwrap_or(usize::MAX);
        (v, m, r.trial)
    };
    let mut trials: Vec<TrialResult> = per_cell.into_iter().flatten().collect();
    trials.sort_by_key(order);

    let cells = trials
        .chunk_by(|a, b| a.variant == b.variant && a.mu == b.mu)
        .map(aggregate)
        .collect();
    Ok(Sweep { cells, trials })
}

fn aggregate(group: &[TrialResult]) -> SweepCell {
    let k = group.len() as f64;
    let mean = group.iter().map(|r| r.mse).sum::<f64>() / k;
    let stderr = if group.len() > 1 {
        let var = group.iter().map(|r| (r.mse - mean).powi(2)).sum::<f64>() / (k - 1.0);
        (var / k).sqrt()
    } else {
        0.0
    };
    SweepCell {
        variant: group[0].variant.clone(),
        mu: group[0].mu,
        mean_mse: mean,
        stderr_mse: stderr,
        mean_iters: group.iter().map(|r| r.iterations as f64).sum::<f64>() / k,
        trials: group.len(),
    }
}
