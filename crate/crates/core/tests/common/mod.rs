//! Workload builders shared by the integration and acceptance tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sizesched::workload::generate;
use sizesched::{GenParams, Job, Workload};

/// Grid step for arrivals, sizes and estimates of oracle workloads. Values on
/// a coarse grid keep the fluid engine and the stepped oracle from resolving
/// exact ties differently.
pub const GRID: f64 = 0.05;

fn snap(x: f64) -> f64 {
    ((x / GRID).round() * GRID).max(GRID)
}

/// Small synthetic workload with randomly mixed generator parameters, every
/// time and size rounded onto [`GRID`].
pub fn mixed_grid_workload(seed: u64, max_jobs: usize) -> Workload {
    let w = mixed_workload(seed, max_jobs);
    let jobs = w
        .jobs
        .iter()
        .map(|j| {
            let arrival = (j.arrival / GRID).round() * GRID;
            Job::new(j.id.0, arrival, snap(j.size).min(20.0), snap(j.estimate).min(40.0))
        })
        .collect();
    Workload::manual(jobs)
}

/// Small synthetic workload with randomly mixed generator parameters.
pub fn mixed_workload(seed: u64, max_jobs: usize) -> Workload {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = GenParams {
        shape: [0.25, 0.5, 1.0, 2.0, 4.0][rng.random_range(0..5)],
        timeshape: [0.5, 1.0, 2.0][rng.random_range(0..3)],
        sigma: [0.0, 0.5, 1.0, 2.0][rng.random_range(0..4)],
        load: [0.5, 0.7, 0.9, 0.95][rng.random_range(0..4)],
        njobs: rng.random_range(1..=max_jobs),
        seed: rng.random(),
    };
    generate(&params).expect("valid params")
}

/// Random workload with exact estimates and real-valued (unrounded) times.
pub fn exact_workload(seed: u64, max_jobs: usize) -> Workload {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = GenParams {
        shape: [0.25, 0.5, 1.0, 2.0, 4.0][rng.random_range(0..5)],
        sigma: 0.0,
        load: [0.5, 0.9, 0.99][rng.random_range(0..3)],
        njobs: rng.random_range(1..=max_jobs),
        seed: rng.random(),
        ..GenParams::default()
    };
    generate(&params).expect("valid params")
}

/// End of the busy period each job belongs to. Any work-conserving server
/// empties at exactly these instants, whatever order it serves jobs in.
pub fn busy_period_ends(w: &Workload) -> Vec<f64> {
    let mut ends = vec![0.0; w.len()];
    let mut start = 0;
    let mut end = f64::NEG_INFINITY;
    for (i, job) in w.jobs.iter().enumerate() {
        if job.arrival > end {
            ends[start..i].fill(end);
            start = i;
            end = job.arrival;
        }
        end += job.size;
    }
    ends[start..].fill(end);
    ends
}
