//! Independent trajectories run concurrently, gathered in index order.

use rayon::prelude::*;

use crate::control::QubitFeedbackSetting;
use crate::error::{Error, Result};
use crate::model::SimParams;
use crate::qops::{build_operator_set, DensityMatrix};
use crate::sme::{derive_seed, simulate_trajectory_with_ops, TrajectoryRecord};

/// Runs `f(0..n)` on a pool of `threads` workers (0 picks the rayon
/// default) and returns the results in index order.
pub fn run_indexed<T, F>(n: usize, threads: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Domain(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(|| (0..n).into_par_iter().map(&f).collect()))
}

#[derive(Clone, Debug)]
pub struct TrajectoryFailure {
    pub index: usize,
    pub seed: u64,
    pub error: Error,
}

#[derive(Clone, Debug)]
pub struct EnsembleResult {
    pub master_seed: u64,
    /// One slot per trajectory index; `None` for diverged runs.
    pub records: Vec<Option<TrajectoryRecord>>,
    pub failures: Vec<TrajectoryFailure>,
}

impl EnsembleResult {
    pub fn completed(&self) -> impl Iterator<Item = &TrajectoryRecord> {
        self.records.iter().flatten()
    }

    pub fn n_completed(&self) -> usize {
        self.records.iter().filter(|r| r.is_some()).count()
    }
}

/// `n` trajectories from `rho0`; trajectory `i` uses seed
/// `derive_seed(params.seed, i)`. More than 10% divergences is an error.
pub fn run_ensemble(
    rho0: &DensityMatrix,
    params: &SimParams,
    controller: Option<&QubitFeedbackSetting>,
    n: usize,
    threads: usize,
) -> Result<EnsembleResult> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n_trajectories",
            reason: "must be at least 1".into(),
        });
    }
    params.validate()?;
    let ops = build_operator_set(params.fock_dim)?;
    let outcomes = run_indexed(n, threads, |i| {
        let seed = derive_seed(params.seed, i as u64);
        let p = SimParams { seed, ..params.clone() };
        (seed, simulate_trajectory_with_ops(rho0, &p, controller, &ops))
    })?;

    let mut records = Vec::with_capacity(n);
    let mut failures = Vec::new();
    for (index, (seed, outcome)) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(r) => records.push(Some(r)),
            Err(error) => {
                log::warn!("trajectory {index} (seed {seed}) failed: {error}");
                failures.push(TrajectoryFailure { index, seed, error });
                records.push(None);
            }
        }
    }
    if failures.len() * 10 > n {
        return Err(Error::TooManyDivergences(failures.len(), n));
    }
    Ok(EnsembleResult {
        master_seed: params.seed,
        records,
        failures,
    })
}

/// Across-trajectory means of the recorded observables, with the standard
/// error of `<x>`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleMean {
    pub count: usize,
    pub times: Vec<f64>,
    pub x_mean: Vec<f64>,
    pub x_stderr: Vec<f64>,
    pub p_mean: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub bloch: Vec<[f64; 3]>,
    pub p_plus: Vec<f64>,
    pub purity: Vec<f64>,
}

pub fn ensemble_mean<'a, I>(records: I) -> Result<EnsembleMean>
where
    I: IntoIterator<Item = &'a TrajectoryRecord>,
{
    let records: Vec<&TrajectoryRecord> = records.into_iter().collect();
    let first = records
        .first()
        .ok_or_else(|| Error::InvalidParameter {
            name: "n_trajectories",
            reason: "no completed trajectories to average".into(),
        })?;
    let len = first.len();
    if let Some(bad) = records.iter().find(|r| r.len() != len) {
        return Err(Error::SeriesLengthMismatch(format!("{} samples vs {}", bad.len(), len)));
    }
    let m = records.len() as f64;
    let avg = |f: &dyn Fn(&TrajectoryRecord, usize) -> f64| -> Vec<f64> {
        (0..len).map(|k| records.iter().map(|r| f(r, k)).sum::<f64>() / m).collect()
    };
    let x_mean = avg(&|r, k| r.x_mean[k]);
    let x_stderr = (0..len)
        .map(|k| {
            if records.len() < 2 {
                return 0.0;
            }
            let ss: f64 = records.iter().map(|r| (r.x_mean[k] - x_mean[k]).powi(2)).sum();
            (ss / (m - 1.0) / m).sqrt()
        })
        .collect();
    let bx = avg(&|r, k| r.bloch[k][0]);
    let by = avg(&|r, k| r.bloch[k][1]);
    let bz = avg(&|r, k| r.bloch[k][2]);
    Ok(EnsembleMean {
        count: records.len(),
        times: first.times.clone(),
        p_mean: avg(&|r, k| r.p_mean[k]),
        amplitude: avg(&|r, k| r.amplitude[k]),
        bloch: (0..len).map(|k| [bx[k], by[k], bz[k]]).collect(),
        p_plus: avg(&|r, k| r.p_plus[k]),
        purity: avg(&|r, k| r.purity[k]),
        x_mean,
        x_stderr,
    })
}
