//! Parameter sweeps with paired repetitions.
//!
//! Every repetition of a grid cell draws one workload and runs every policy
//! on it (common random numbers), so ratios against the PS and exact-SRPT
//! baselines are formed per repetition and then averaged.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{run, SimError};
use crate::metrics::{self, McsBin, MetricsError, DEFAULT_MCS_BINS};
use crate::model::{GenParams, JobOutcome, Workload};
use crate::policies::PolicyKind;
use crate::workload::{generate, mix_seed, parse_trace, GenError, TraceError};

mod output;
mod presets;

pub use output::{emit_results, parse_results_json, results_to_csv, results_to_json, Format, RawWriter};
pub use presets::{preset, PRESETS};

pub const DEFAULT_REPETITIONS: usize = 30;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Generation(#[from] GenError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot encode results: {0}")]
    Encode(String),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Shape,
    Sigma,
    Load,
    Timeshape,
    Njobs,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Shape => "shape",
            Axis::Sigma => "sigma",
            Axis::Load => "load",
            Axis::Timeshape => "timeshape",
            Axis::Njobs => "njobs",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "shape" => Ok(Axis::Shape),
            "sigma" => Ok(Axis::Sigma),
            "load" => Ok(Axis::Load),
            "timeshape" => Ok(Axis::Timeshape),
            "njobs" => Ok(Axis::Njobs),
            _ => Err(ExperimentError::InvalidSpec(format!("unknown axis {s:?}"))),
        }
    }
}

/// Workload parameters of one grid cell. The synthetic-only fields are absent
/// for trace replays.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub shape: Option<f64>,
    pub sigma: f64,
    pub load: Option<f64>,
    pub timeshape: Option<f64>,
    pub njobs: usize,
}

impl Default for ParamPoint {
    fn default() -> Self {
        let d = GenParams::default();
        ParamPoint {
            shape: Some(d.shape),
            sigma: d.sigma,
            load: Some(d.load),
            timeshape: Some(d.timeshape),
            njobs: d.njobs,
        }
    }
}

impl ParamPoint {
    fn with(mut self, axis: Axis, value: f64) -> Self {
        match axis {
            Axis::Shape => self.shape = Some(value),
            Axis::Sigma => self.sigma = value,
            Axis::Load => self.load = Some(value),
            Axis::Timeshape => self.timeshape = Some(value),
            Axis::Njobs => self.njobs = value as usize,
        }
        self
    }

    fn gen_params(&self, seed: u64) -> GenParams {
        let d = GenParams::default();
        GenParams {
            shape: self.shape.unwrap_or(d.shape),
            timeshape: self.timeshape.unwrap_or(d.timeshape),
            sigma: self.sigma,
            load: self.load.unwrap_or(d.load),
            njobs: self.njobs,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub policies: Vec<PolicyKind>,
    /// Values for every parameter not swept.
    pub base: ParamPoint,
    /// At most two axes; the first is the outer loop.
    pub axes: Vec<(Axis, Vec<f64>)>,
    pub repetitions: usize,
    pub base_seed: u64,
    /// Replay this trace instead of generating workloads; only the sigma
    /// axis applies.
    pub trace: Option<PathBuf>,
    /// Worker threads; `None` uses every available core.
    pub workers: Option<usize>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            policies: Vec::new(),
            base: ParamPoint::default(),
            axes: Vec::new(),
            repetitions: DEFAULT_REPETITIONS,
            base_seed: 0,
            trace: None,
            workers: None,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let invalid = |m: String| Err(ExperimentError::InvalidSpec(m));
        if self.policies.is_empty() {
            return invalid("no policies selected".into());
        }
        if self.repetitions == 0 {
            return invalid("repetitions must be at least 1".into());
        }
        if self.axes.len() > 2 {
            return invalid(format!("at most 2 sweep axes, got {}", self.axes.len()));
        }
        let mut seen = BTreeSet::new();
        for (axis, values) in &self.axes {
            if !seen.insert(axis.name()) {
                return invalid(format!("axis {axis} given twice"));
            }
            if values.is_empty() {
                return invalid(format!("axis {axis} has no values"));
            }
            if self.trace.is_some() && *axis != Axis::Sigma {
                return invalid(format!("axis {axis} cannot be swept over a trace"));
            }
            if *axis == Axis::Njobs && values.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
                return invalid("njobs values must be positive integers".into());
            }
        }
        if self.workers == Some(0) {
            return invalid("worker count must be positive".into());
        }
        if self.trace.is_none() {
            for point in self.cells() {
                crate::workload::validate_params(&point.gen_params(0))?;
            }
        }
        Ok(())
    }

    /// Grid cells in canonical order.
    pub fn cells(&self) -> Vec<ParamPoint> {
        let base = if self.trace.is_some() {
            ParamPoint {
                shape: None,
                load: None,
                timeshape: None,
                ..self.base
            }
        } else {
            self.base
        };
        let mut cells = vec![base];
        for (axis, values) in &self.axes {
            cells = cells
                .into_iter()
                .flat_map(|c| values.iter().map(move |&v| c.with(*axis, v)))
                .collect();
        }
        cells
    }

    /// Requested policies plus the two baselines, in canonical order.
    fn policies_to_run(&self) -> Vec<PolicyKind> {
        let mut all: BTreeSet<PolicyKind> = self.policies.iter().copied().collect();
        all.insert(PolicyKind::Ps);
        all.insert(PolicyKind::Srpt);
        all.into_iter().collect()
    }
}

/// Aggregate metrics for one (policy, cell).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub policy: PolicyKind,
    pub params: ParamPoint,
    pub repetitions: usize,
    pub base_seed: u64,
    pub mst_mean: f64,
    /// Sample standard deviation across repetitions; 0 for one repetition.
    pub mst_std: f64,
    pub mst_vs_ps: f64,
    pub mst_vs_srpt: f64,
    pub slowdown_p50: f64,
    pub slowdown_p90: f64,
    pub slowdown_p99: f64,
    /// Bins over the pooled jobs of every repetition; empty if fewer jobs
    /// than bins.
    pub mcs: Vec<McsBin>,
    pub slowdown_cdf: Vec<(f64, f64)>,
}

/// Everything one policy produced on one repetition's workload.
#[derive(Clone, Debug)]
pub struct RepetitionRun {
    pub policy: PolicyKind,
    pub repetition: usize,
    pub workload: std::sync::Arc<Workload>,
    pub outcomes: Vec<JobOutcome>,
}

fn build_workload(
    point: &ParamPoint,
    trace_text: Option<&str>,
    trace_path: Option<&PathBuf>,
    seed: u64,
) -> Result<Workload, ExperimentError> {
    match (trace_text, trace_path) {
        (Some(text), Some(path)) => {
            let jobs = parse_trace(text, point.sigma, seed)?;
            let w = crate::model::validate_workload(Workload {
                jobs,
                provenance: crate::model::Provenance::Trace {
                    path: path.clone(),
                    sigma: point.sigma,
                    seed,
                },
            })
            .map_err(TraceError::from)?;
            Ok(w)
        }
        _ => Ok(generate(&point.gen_params(seed))?),
    }
}

struct PolicyRep {
    mst: f64,
    vs_ps: f64,
    vs_srpt: f64,
}

fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Runs the sweep. `on_cell` sees each completed cell's results (in
/// canonical order) plus the per-repetition runs of the requested policies, so callers can flush
/// partial output or dump raw outcomes as the sweep progresses.
pub fn run_experiment_with<F>(spec: &ExperimentSpec, mut on_cell: F) -> Result<Vec<ExperimentResult>, ExperimentError>
where
    F: FnMut(usize, &[ExperimentResult], &[RepetitionRun]) -> Result<(), ExperimentError>,
{
    spec.validate()?;
    let trace_text = match &spec.trace {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|source| TraceError::Io {
            path: path.clone(),
            source,
        })?),
        None => None,
    };
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = spec.workers {
            b = b.num_threads(n);
        }
        b.build()
            .map_err(|e| ExperimentError::InvalidSpec(format!("cannot start workers: {e}")))?
    };
    let kinds = spec.policies_to_run();
    let ps_idx = kinds.iter().position(|k| *k == PolicyKind::Ps).unwrap();
    let srpt_idx = kinds.iter().position(|k| *k == PolicyKind::Srpt).unwrap();
    let cdf_grid = metrics::default_cdf_grid();

    let mut results = Vec::new();
    for (cell, point) in spec.cells().into_iter().enumerate() {
        let reps: Vec<Result<Vec<RepetitionRun>, ExperimentError>> = pool.install(|| {
            (0..spec.repetitions)
                .into_par_iter()
                .map(|rep| {
                    let seed = mix_seed(spec.base_seed, cell as u64, rep as u64);
                    let workload = std::sync::Arc::new(build_workload(
                        &point,
                        trace_text.as_deref(),
                        spec.trace.as_ref(),
                        seed,
                    )?);
                    kinds
                        .iter()
                        .map(|&kind| {
                            let mut policy = kind.build();
                            let outcomes = run(&workload, &mut policy)?;
                            Ok(RepetitionRun {
                                policy: kind,
                                repetition: rep,
                                workload: workload.clone(),
                                outcomes,
                            })
                        })
                        .collect()
                })
                .collect()
        });
        let reps: Vec<Vec<RepetitionRun>> = reps.into_iter().collect::<Result<_, _>>()?;

        let mut cell_results = Vec::with_capacity(spec.policies.len());
        for (k, &kind) in kinds.iter().enumerate() {
            if !spec.policies.contains(&kind) {
                continue;
            }
            let mut per_rep = Vec::with_capacity(reps.len());
            let mut pooled = Vec::new();
            for runs in &reps {
                let mst = metrics::mean_sojourn_time(&runs[k].outcomes)?;
                per_rep.push(PolicyRep {
                    mst,
                    vs_ps: mst / metrics::mean_sojourn_time(&runs[ps_idx].outcomes)?,
                    vs_srpt: mst / metrics::mean_sojourn_time(&runs[srpt_idx].outcomes)?,
                });
                pooled.extend_from_slice(&runs[k].outcomes);
            }
            let n = per_rep.len() as f64;
            let msts: Vec<f64> = per_rep.iter().map(|r| r.mst).collect();
            let mut slowdowns: Vec<f64> = pooled.iter().map(|o| o.slowdown).collect();
            slowdowns.sort_by(f64::total_cmp);
            let q = |p| metrics::quantile_sorted(&slowdowns, p).unwrap_or(f64::NAN);
            cell_results.push(ExperimentResult {
                policy: kind,
                params: point,
                repetitions: spec.repetitions,
                base_seed: spec.base_seed,
                mst_mean: msts.iter().sum::<f64>() / n,
                mst_std: sample_std(&msts),
                mst_vs_ps: per_rep.iter().map(|r| r.vs_ps).sum::<f64>() / n,
                mst_vs_srpt: per_rep.iter().map(|r| r.vs_srpt).sum::<f64>() / n,
                slowdown_p50: q(0.5),
                slowdown_p90: q(0.9),
                slowdown_p99: q(0.99),
                mcs: metrics::mean_conditional_slowdown(&pooled, DEFAULT_MCS_BINS).unwrap_or_default(),
                slowdown_cdf: metrics::slowdown_cdf_of(&slowdowns, &cdf_grid)?,
            });
        }
        // Canonical row order: the order policies were requested in.
        cell_results.sort_by_key(|r| spec.policies.iter().position(|p| *p == r.policy));
        // Baselines added only for normalization are not reported.
        let flat: Vec<RepetitionRun> = reps
            .into_iter()
            .flatten()
            .filter(|r| spec.policies.contains(&r.policy))
            .collect();
        on_cell(cell, &cell_results, &flat)?;
        results.extend(cell_results);
    }
    Ok(results)
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ExperimentResult>, ExperimentError> {
    run_experiment_with(spec, |_, _, _| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_cells_outer_axis_first() {
        let spec = ExperimentSpec {
            policies: vec![PolicyKind::Spt],
            axes: vec![(Axis::Shape, vec![0.5, 1.0]), (Axis::Sigma, vec![0.0, 1.0, 2.0])],
            ..ExperimentSpec::default()
        };
        let cells = spec.cells();
        assert_eq!(cells.len(), 6);
        assert_eq!(cells[0].shape, Some(0.5));
        assert_eq!(cells[2].sigma, 2.0);
        assert_eq!(cells[3].shape, Some(1.0));
        assert_eq!(cells[3].sigma, 0.0);
    }

    #[test]
    fn invalid_specs_rejected() {
        let ok = ExperimentSpec {
            policies: vec![PolicyKind::Ps],
            ..ExperimentSpec::default()
        };
        assert!(ok.validate().is_ok());
        for bad in [
            ExperimentSpec {
                policies: vec![],
                ..ok.clone()
            },
            ExperimentSpec {
                repetitions: 0,
                ..ok.clone()
            },
            ExperimentSpec {
                axes: vec![
                    (Axis::Shape, vec![1.0]),
                    (Axis::Sigma, vec![1.0]),
                    (Axis::Load, vec![0.5]),
                ],
                ..ok.clone()
            },
            ExperimentSpec {
                axes: vec![(Axis::Load, vec![1.5])],
                ..ok.clone()
            },
            ExperimentSpec {
                axes: vec![(Axis::Njobs, vec![2.5])],
                ..ok.clone()
            },
            ExperimentSpec {
                trace: Some("t.csv".into()),
                axes: vec![(Axis::Shape, vec![1.0])],
                ..ok.clone()
            },
        ] {
            assert!(matches!(
                bad.validate(),
                Err(ExperimentError::InvalidSpec(_) | ExperimentError::Generation(_))
            ));
        }
    }

    #[test]
    fn single_job_mst_is_its_size() {
        let spec = ExperimentSpec {
            policies: vec![PolicyKind::Spt],
            axes: vec![(Axis::Njobs, vec![1.0])],
            repetitions: 1,
            base_seed: 11,
            ..ExperimentSpec::default()
        };
        let results = run_experiment(&spec).unwrap();
        assert_eq!(results.len(), 1);
        let w = generate(&spec.cells()[0].gen_params(mix_seed(11, 0, 0))).unwrap();
        assert!((results[0].mst_mean - w.jobs[0].size).abs() <= 1e-12 * w.jobs[0].size);
        assert_eq!(results[0].mst_std, 0.0);
        assert!(results[0].mcs.is_empty());
    }

    #[test]
    fn baseline_rows_are_self_normalized() {
        let spec = ExperimentSpec {
            policies: vec![PolicyKind::Ps, PolicyKind::Srpt, PolicyKind::Spte],
            base: ParamPoint {
                njobs: 300,
                ..ParamPoint::default()
            },
            repetitions: 3,
            ..ExperimentSpec::default()
        };
        let results = run_experiment(&spec).unwrap();
        let names: Vec<_> = results.iter().map(|r| r.policy).collect();
        assert_eq!(names, spec.policies);
        assert_eq!(results[0].mst_vs_ps, 1.0);
        assert_eq!(results[1].mst_vs_srpt, 1.0);
        assert!(results[2].mst_vs_srpt >= 1.0 - 1e-9);
    }
}
