//! Domain types shared by the engine, the policies and the experiment driver.

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance: a job is done once its remaining work is at most this
/// fraction of its size; the same bound decides "equal" attained service and
/// equal scheduling keys, and caps allocation rate sums.
pub const EPSILON: f64 = 1e-9;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JobId(pub u64);

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One unit of work. `size` is the true service demand, `estimate` what
/// size-based schedulers are told.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub id: JobId,
    pub arrival: f64,
    pub size: f64,
    pub estimate: f64,
}

impl Job {
    pub fn new(id: u64, arrival: f64, size: f64, estimate: f64) -> Self {
        Job {
            id: JobId(id),
            arrival,
            size,
            estimate,
        }
    }

    /// Job whose estimate is exact.
    pub fn exact(id: u64, arrival: f64, size: f64) -> Self {
        Job::new(id, arrival, size, size)
    }

    /// Deterministic ordering key used wherever ties must be broken.
    pub fn order_key(&self) -> (f64, JobId) {
        (self.arrival, self.id)
    }

    pub(crate) fn arrives_before(&self, other: &Job) -> bool {
        match self.arrival.total_cmp(&other.arrival) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => self.id < other.id,
        }
    }
}

/// Per-job result of a simulation run.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobOutcome {
    pub job_id: JobId,
    pub arrival: f64,
    pub size: f64,
    pub completion: f64,
    pub sojourn: f64,
    pub slowdown: f64,
}

impl JobOutcome {
    /// Slowdown is always relative to the true size, never the estimate.
    pub fn new(job: &Job, completion: f64) -> Self {
        JobOutcome::with_sojourn(job, completion, completion - job.arrival)
    }

    /// Like [`JobOutcome::new`] with a sojourn time measured more precisely
    /// than `completion - arrival` can represent.
    pub fn with_sojourn(job: &Job, completion: f64, sojourn: f64) -> Self {
        JobOutcome {
            job_id: job.id,
            arrival: job.arrival,
            size: job.size,
            completion,
            sojourn,
            slowdown: sojourn / job.size,
        }
    }
}

/// Service rates handed out by a policy for the interval until the next event.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Allocation {
    entries: Vec<(JobId, f64)>,
}

impl Allocation {
    pub fn empty() -> Self {
        Allocation::default()
    }

    /// Whole server to a single job.
    pub fn single(id: JobId) -> Self {
        Allocation {
            entries: vec![(id, 1.0)],
        }
    }

    /// Equal shares among `ids`.
    pub fn shared<I>(ids: I) -> Self
    where
        I: IntoIterator<Item = JobId>,
    {
        let ids: Vec<JobId> = ids.into_iter().collect();
        if ids.is_empty() {
            return Allocation::empty();
        }
        let rate = 1.0 / ids.len() as f64;
        Allocation {
            entries: ids.into_iter().map(|id| (id, rate)).collect(),
        }
    }

    pub fn from_entries(entries: Vec<(JobId, f64)>) -> Self {
        Allocation { entries }
    }

    pub fn entries(&self) -> &[(JobId, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn total_rate(&self) -> f64 {
        self.entries.iter().map(|&(_, r)| r).sum()
    }

    pub fn rate_of(&self, id: JobId) -> Option<f64> {
        self.entries.iter().find(|(j, _)| *j == id).map(|&(_, r)| r)
    }
}

/// Parameters of the synthetic workload generator.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    /// Weibull shape of job sizes; below 1 is heavy-tailed.
    pub shape: f64,
    /// Weibull shape of inter-arrival gaps; 1 gives Poisson arrivals.
    pub timeshape: f64,
    /// Log-normal estimation error sigma.
    pub sigma: f64,
    pub load: f64,
    pub njobs: usize,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            shape: 0.25,
            timeshape: 1.0,
            sigma: 0.5,
            load: 0.9,
            njobs: 10_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Synthetic(GenParams),
    Trace { path: PathBuf, sigma: f64, seed: u64 },
    Manual,
}

/// Jobs sorted by (arrival, id) plus where they came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Workload {
    pub jobs: Vec<Job>,
    pub provenance: Provenance,
}

impl Workload {
    pub fn manual(jobs: Vec<Job>) -> Self {
        Workload {
            jobs,
            provenance: Provenance::Manual,
        }
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn total_work(&self) -> f64 {
        self.jobs.iter().map(|j| j.size).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("job {0} has non-positive size {1}")]
    NonPositiveSize(JobId, f64),
    #[error("job {0} has non-positive estimate {1}")]
    NonPositiveEstimate(JobId, f64),
    #[error("job {0} has negative arrival time {1}")]
    NegativeArrival(JobId, f64),
    #[error("job id {0} appears more than once")]
    DuplicateId(JobId),
}

/// Checks every job invariant and returns the workload sorted by (arrival, id).
///
/// NaN sizes, estimates and arrivals are rejected through the same variants as
/// their out-of-range counterparts.
pub fn validate_workload(mut w: Workload) -> Result<Workload, ModelError> {
    let mut seen = HashSet::with_capacity(w.jobs.len());
    for job in &w.jobs {
        if !(job.size.is_finite() && job.size > 0.0) {
            return Err(ModelError::NonPositiveSize(job.id, job.size));
        }
        if !(job.estimate.is_finite() && job.estimate > 0.0) {
            return Err(ModelError::NonPositiveEstimate(job.id, job.estimate));
        }
        if !(job.arrival.is_finite() && job.arrival >= 0.0) {
            return Err(ModelError::NegativeArrival(job.id, job.arrival));
        }
        if !seen.insert(job.id) {
            return Err(ModelError::DuplicateId(job.id));
        }
    }
    let sorted = w.jobs.windows(2).all(|p| p[0].arrives_before(&p[1]));
    if !sorted {
        w.jobs
            .sort_by(|a, b| a.arrival.total_cmp(&b.arrival).then_with(|| a.id.cmp(&b.id)));
    }
    Ok(w)
}
