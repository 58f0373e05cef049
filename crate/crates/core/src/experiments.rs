//! Monte Carlo studies: `mst_k(K_n)` under uniform weights, κ-core sizes in
//! `G(n, c/n)` and orientations of 3-cores with indegree target two.
//!
//! Each trial draws its own seed from the master seed by trial index, so
//! results do not depend on how rayon schedules the trials.

use crate::graph::{kcore, sample_complete_weights, sample_gnp, GraphError, WeightMode};
use crate::matroid::{min_weight_k_spanning_trees, orient_indegree_target, MatroidError};
use crate::thresholds::{core_fractions, CoreFractions, ThresholdError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("K_{n} has no {k} edge-disjoint spanning trees; need n >= 2k")]
    Infeasible { n: usize, k: usize },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
}

/// The seed of trial `index` under master seed `seed`.
pub fn trial_seed(seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.gen()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: u64,
    pub value: f64,
    /// Sum of the `k(n-1)` smallest weights of the sample, a lower bound on `value`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smallest_sum: Option<f64>,
    pub runtime_secs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialSummary {
    pub n: usize,
    pub k: usize,
    /// Trials that produced a value; skipped ones are not counted.
    pub trials: usize,
    pub skipped: usize,
    pub mean: f64,
    pub stderr: f64,
    pub records: Vec<TrialRecord>,
    pub seed: u64,
    pub runtime_secs: f64,
}

impl TrialSummary {
    fn collect(n: usize, k: usize, seed: u64, records: Vec<Option<TrialRecord>>, started: Instant) -> Self {
        let skipped = records.iter().filter(|r| r.is_none()).count();
        let records: Vec<TrialRecord> = records.into_iter().flatten().collect();
        let (mean, stderr) = mean_stderr(records.iter().map(|r| r.value));
        TrialSummary {
            n,
            k,
            trials: records.len(),
            skipped,
            mean,
            stderr,
            records,
            seed,
            runtime_secs: started.elapsed().as_secs_f64(),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.value).collect()
    }
}

/// Mean and `s/sqrt(t)` with the unbiased sample deviation; NaN when empty,
/// zero error for a single value.
fn mean_stderr(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let t = values.clone().count();
    if t == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / t as f64;
    if t == 1 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (t - 1) as f64;
    (mean, (var / t as f64).sqrt())
}

fn check_trials(trials: usize) -> Result<(), ExperimentError> {
    if trials == 0 {
        Err(ExperimentError::Argument("trials must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Mean of `mst_k(K_n)` over `trials` independent uniform weightings.
pub fn monte_carlo_mst_k(n: usize, k: usize, trials: usize, seed: u64) -> Result<TrialSummary, ExperimentError> {
    check_trials(trials)?;
    if k == 0 || n < 2 * k {
        return Err(ExperimentError::Infeasible { n, k });
    }
    let started = Instant::now();
    let records = (0..trials)
        .into_par_iter()
        .map(|index| {
            let t0 = Instant::now();
            let seed = trial_seed(seed, index);
            let g = sample_complete_weights(n, seed)?;
            let value = min_weight_k_spanning_trees(&g, k)?.total_weight;
            let mut w: Vec<f64> = g.edges().iter().map(|e| e.weight).collect();
            let take = k * (n - 1);
            w.select_nth_unstable_by(take - 1, f64::total_cmp);
            Ok(Some(TrialRecord {
                index,
                seed,
                value,
                smallest_sum: Some(w[..take].iter().sum()),
                runtime_secs: t0.elapsed().as_secs_f64(),
            }))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    Ok(TrialSummary::collect(n, k, seed, records, started))
}

/// κ-core sizes over `G(n, c/n)` samples against the limiting prediction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoreStatistics {
    pub c: f64,
    pub kappa: usize,
    /// Core vertices per vertex of the graph.
    pub vertex: TrialSummary,
    /// Core edges per vertex of the graph.
    pub edge: TrialSummary,
    /// `None` below the threshold, where the core is empty in the limit.
    pub predicted: Option<CoreFractions>,
    pub empty_cores: usize,
}

impl CoreStatistics {
    pub fn empty_frequency(&self) -> f64 {
        self.empty_cores as f64 / self.vertex.trials as f64
    }
}

pub fn empirical_core_statistics(
    n: usize,
    c: f64,
    kappa: usize,
    trials: usize,
    seed: u64,
) -> Result<CoreStatistics, ExperimentError> {
    check_trials(trials)?;
    if !(c > 0.0) || n < 2 || kappa < 1 {
        return Err(ExperimentError::Argument(format!(
            "need c > 0, n >= 2, kappa >= 1; got c = {c}, n = {n}, kappa = {kappa}"
        )));
    }
    let p = (c / n as f64).min(1.0);
    let started = Instant::now();
    let rows = (0..trials)
        .into_par_iter()
        .map(|index| {
            let t0 = Instant::now();
            let seed = trial_seed(seed, index);
            let g = sample_gnp(n, p, seed, WeightMode::Uniform)?;
            let core = kcore(&g, kappa);
            let runtime_secs = t0.elapsed().as_secs_f64();
            let record = |count: usize| TrialRecord {
                index,
                seed,
                value: count as f64 / n as f64,
                smallest_sum: None,
                runtime_secs,
            };
            Ok((record(core.core_vertices.len()), record(core.core_edges.len())))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let empty_cores = rows.iter().filter(|(v, _)| v.value == 0.0).count();
    let (vertex, edge): (Vec<_>, Vec<_>) = rows.into_iter().map(|(v, e)| (Some(v), Some(e))).unzip();
    let predicted = match core_fractions(kappa, c) {
        Ok(f) => Some(f),
        Err(ThresholdError::BelowThreshold { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(CoreStatistics {
        c,
        kappa,
        vertex: TrialSummary::collect(n, kappa, seed, vertex, started),
        edge: TrialSummary::collect(n, kappa, seed, edge, started),
        predicted,
        empty_cores,
    })
}

/// Orients the 3-core of `G(n, c/n)` so that each vertex takes up to two
/// edges and reports `routed / 2N` for a core of `N` vertices. Trials with an
/// empty core are skipped.
pub fn orientation_experiment(n: usize, c: f64, trials: usize, seed: u64) -> Result<TrialSummary, ExperimentError> {
    check_trials(trials)?;
    if !(c > 0.0) || n < 2 {
        return Err(ExperimentError::Argument(format!(
            "need c > 0 and n >= 2; got c = {c}, n = {n}"
        )));
    }
    let p = (c / n as f64).min(1.0);
    let started = Instant::now();
    let records = (0..trials)
        .into_par_iter()
        .map(|index| {
            let t0 = Instant::now();
            let seed = trial_seed(seed, index);
            let g = sample_gnp(n, p, seed, WeightMode::Uniform)?;
            let core = kcore(&g, 3);
            if core.is_empty() {
                return Ok(None);
            }
            let (sub, _) = g.induced(&core.core_vertices);
            let (_, flow) = orient_indegree_target(&sub, 2);
            Ok(Some(TrialRecord {
                index,
                seed,
                value: flow as f64 / (2 * sub.n()) as f64,
                smallest_sum: None,
                runtime_secs: t0.elapsed().as_secs_f64(),
            }))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    Ok(TrialSummary::collect(n, 2, seed, records, started))
}
