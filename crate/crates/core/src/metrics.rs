//! Mean sojourn time, slowdown distribution and mean conditional slowdown.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::JobOutcome;

pub const DEFAULT_MCS_BINS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("no outcomes to summarize")]
    EmptyInput,
    #[error("need at least {need} jobs, got {have}")]
    TooFewJobs { have: usize, need: usize },
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McsBin {
    pub mean_size: f64,
    pub mean_slowdown: f64,
    pub count: usize,
}

pub fn mean_sojourn_time(outcomes: &[JobOutcome]) -> Result<f64, MetricsError> {
    if outcomes.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    Ok(outcomes.iter().map(|o| o.sojourn).sum::<f64>() / outcomes.len() as f64)
}

/// MST of `outcomes` over MST of `baseline` (same workload, other policy).
pub fn normalized_mst(outcomes: &[JobOutcome], baseline: &[JobOutcome]) -> Result<f64, MetricsError> {
    Ok(mean_sojourn_time(outcomes)? / mean_sojourn_time(baseline)?)
}

/// Empirical CDF of `slowdowns` evaluated at each threshold: the fraction of
/// values `<= threshold`.
pub fn slowdown_cdf_of(slowdowns: &[f64], grid: &[f64]) -> Result<Vec<(f64, f64)>, MetricsError> {
    if slowdowns.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut sorted = slowdowns.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(grid
        .iter()
        .map(|&t| (t, sorted.partition_point(|&s| s <= t) as f64 / n))
        .collect())
}

pub fn slowdown_cdf(outcomes: &[JobOutcome], grid: &[f64]) -> Result<Vec<(f64, f64)>, MetricsError> {
    let slowdowns: Vec<f64> = outcomes.iter().map(|o| o.slowdown).collect();
    slowdown_cdf_of(&slowdowns, grid)
}

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let step = (b - a) / (points - 1) as f64;
            (0..points)
                .map(|i| match i {
                    0 => lo,
                    i if i + 1 == points => hi,
                    i => (a + step * i as f64).exp(),
                })
                .collect()
        }
    }
}

/// Default file-output grid for slowdown CDFs.
pub fn default_cdf_grid() -> Vec<f64> {
    log_grid(1.0, 100.0, 200)
}

/// Linearly interpolated quantile of already sorted data, `q` in [0, 1].
pub fn quantile_sorted(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64))
}

/// Sorts jobs by true size and splits them into `nbins` contiguous bins of
/// equal population; the remainder goes one extra job each to the first bins.
pub fn mean_conditional_slowdown(outcomes: &[JobOutcome], nbins: usize) -> Result<Vec<McsBin>, MetricsError> {
    if outcomes.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    if nbins == 0 || outcomes.len() < nbins {
        return Err(MetricsError::TooFewJobs {
            have: outcomes.len(),
            need: nbins.max(1),
        });
    }
    let mut jobs: Vec<(f64, f64)> = outcomes.iter().map(|o| (o.size, o.slowdown)).collect();
    jobs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let base = jobs.len() / nbins;
    let extra = jobs.len() % nbins;
    let mut bins = Vec::with_capacity(nbins);
    let mut start = 0;
    for i in 0..nbins {
        let count = base + usize::from(i < extra);
        let chunk = &jobs[start..start + count];
        start += count;
        let n = count as f64;
        // Averaging offsets from the bin's smallest size and clamping to its
        // range keeps bin means ordered even when neighbouring bins hold
        // identical sizes.
        let (lo, hi) = (chunk[0].0, chunk[count - 1].0);
        let mean_size = (lo + chunk.iter().map(|j| j.0 - lo).sum::<f64>() / n).clamp(lo, hi);
        bins.push(McsBin {
            mean_size,
            mean_slowdown: chunk.iter().map(|j| j.1).sum::<f64>() / n,
            count,
        });
    }
    Ok(bins)
}
