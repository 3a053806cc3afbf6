//! Parallel Monte Carlo over the core batch kernels.
//!
//! Batches run on the current rayon pool and are reduced in batch order, so
//! every result depends only on the inputs and the seed.

use permconc::exchange::f_scale_t1;
use permconc::sampling::{
    batch_count, pair_moments_batch, tail_hits_batch, validate_grid, PairMomentSums, Target,
};
use permconc::StatKind;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, ToolError};
use crate::interval::clopper_pearson_99;

/// Empirical `P(|T - E[T]| >= t)` along a grid with 99% intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    pub stat: String,
    pub n: usize,
    pub seed: u64,
    pub samples: u64,
    /// The closed-form mean the deviations are measured from.
    pub center: f64,
    pub t_grid: Vec<f64>,
    pub hits: Vec<u64>,
    pub point: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
}

pub fn estimate_tail(target: &Target<'_>, grid: &[f64], samples: u64, seed: u64) -> Result<TailEstimate> {
    if samples == 0 {
        return Err(ToolError::Usage("samples must be at least 1".into()));
    }
    validate_grid(grid)?;
    let center = target.mean();
    let per_batch: Vec<Vec<u64>> = (0..batch_count(samples))
        .into_par_iter()
        .map(|b| tail_hits_batch(target, grid, center, seed, b, samples))
        .collect();
    let mut hits = vec![0u64; grid.len()];
    for batch in &per_batch {
        for (h, x) in hits.iter_mut().zip(batch) {
            *h += x;
        }
    }
    let intervals: Vec<(f64, f64)> = hits.par_iter().map(|&h| clopper_pearson_99(h, samples)).collect();
    Ok(TailEstimate {
        stat: target.kind().name().to_string(),
        n: target.n(),
        seed,
        samples,
        center,
        t_grid: grid.to_vec(),
        point: hits.iter().map(|&h| h as f64 / samples as f64).collect(),
        ci_low: intervals.iter().map(|i| i.0).collect(),
        ci_high: intervals.iter().map(|i| i.1).collect(),
        hits,
    })
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSe {
    pub mean: f64,
    pub se: f64,
}

impl MeanSe {
    fn from_sums(sum: f64, sum_sq: f64, count: u64) -> Self {
        let c = count as f64;
        let mean = sum / c;
        let var = if count > 1 { ((sum_sq - c * mean * mean) / (c - 1.0)).max(0.0) } else { 0.0 };
        Self { mean, se: (var / c).sqrt() }
    }
}

/// Moments of `Δ = T - T'` over fresh `(state, move)` draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairMoments {
    pub stat: &'static str,
    pub n: usize,
    pub seed: u64,
    pub samples: u64,
    pub abs_delta: MeanSe,
    pub delta_sq: MeanSe,
    /// Exact per-state drift `E[Δ | state]`, averaged over sampled states.
    pub drift: MeanSe,
    /// Per-state bounds on `E[|Δ| | state]` and `E[Δ² | state]`, averaged.
    pub mean_abs_bound: f64,
    pub mean_sq_bound: f64,
    pub mean_stat: f64,
    /// Mean drift times the `F` scale, i.e. the mean of `f`.
    pub scaled_drift_mean: f64,
}

pub fn estimate_pair_moments(target: &Target<'_>, samples: u64, seed: u64) -> Result<PairMoments> {
    if samples == 0 {
        return Err(ToolError::Usage("samples must be at least 1".into()));
    }
    let parts: Vec<PairMomentSums> = (0..batch_count(samples))
        .into_par_iter()
        .map(|b| pair_moments_batch(target, seed, b, samples))
        .collect::<permconc::Result<_>>()?;
    let mut s = PairMomentSums::default();
    for p in &parts {
        s.merge(p);
    }
    let c = s.count as f64;
    let drift = MeanSe::from_sums(s.drift, s.drift_sq, s.count);
    let scale = match target.kind() {
        StatKind::T1 => f_scale_t1(target.n()),
        _ => permconc::exchange::f_scale_t2(target.n()),
    };
    Ok(PairMoments {
        stat: target.kind().name(),
        n: target.n(),
        seed,
        samples,
        abs_delta: MeanSe::from_sums(s.abs_delta, s.abs_delta_sq, s.count),
        delta_sq: MeanSe::from_sums(s.delta_sq, s.delta_sq_sq, s.count),
        drift,
        mean_abs_bound: s.abs_bound / c,
        mean_sq_bound: s.sq_bound / c,
        mean_stat: s.stat / c,
        scaled_drift_mean: drift.mean * scale,
    })
}
