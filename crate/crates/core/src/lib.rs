//! Simulator for preemptive single-server scheduling when schedulers only
//! see estimated job sizes.
//!
//! [`engine`] runs a fluid event-driven simulation of one workload under one
//! [`engine::Policy`]; [`policies`] holds PS, LAS, SRPT, SPT, FSP/PSBS, CS and
//! MCSS; [`workload`] draws Weibull workloads with log-normal estimation
//! errors or replays CSV traces; [`metrics`] and [`experiment`] turn runs
//! into mean sojourn times, slowdown distributions and sweep results.

pub mod engine;
pub mod experiment;
pub mod metrics;
pub mod model;
pub mod policies;
pub mod workload;

pub use engine::{run, run_quantum_oracle, Policy, PresentJob, SimError, SystemState};
pub use model::{
    validate_workload, Allocation, GenParams, Job, JobId, JobOutcome, ModelError, Provenance, Workload, EPSILON,
};
pub use policies::PolicyKind;
