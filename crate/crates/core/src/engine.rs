//! Event-driven fluid simulation of a unit-rate preemptive server.
//!
//! Between two events every job receives service at the constant rate its
//! policy assigned, so time can jump straight to the next arrival, the
//! earliest completion under current rates, or a policy-internal event
//! (LAS catch-up, PSBS virtual departure). Events at the same instant are
//! processed as: completions, then arrivals, then re-allocation.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::model::{validate_workload, Allocation, Job, JobId, JobOutcome, ModelError, Workload, EPSILON};

/// A job currently in the system together with the work it has received.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PresentJob {
    pub job: Job,
    pub attained: f64,
}

impl PresentJob {
    pub fn id(&self) -> JobId {
        self.job.id
    }

    pub fn remaining(&self) -> f64 {
        self.job.size - self.attained
    }

    /// Done once the remaining work is within `EPSILON` of the size.
    pub fn is_done(&self) -> bool {
        self.remaining() <= EPSILON * self.job.size
    }
}

/// Simulation clock kept as an unevaluated sum `hi + lo`.
///
/// Heavy-tailed workloads contain jobs far smaller than one ulp of the clock
/// late in a run; the low word keeps their sojourn times resolvable.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
struct Clock {
    hi: f64,
    lo: f64,
}

impl Clock {
    fn at(t: f64) -> Self {
        Clock { hi: t, lo: 0.0 }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }

    fn advance(&mut self, dt: f64) {
        // Knuth two-sum.
        let s = self.hi + dt;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (dt - bb);
        let lo = self.lo + err;
        self.hi = s + lo;
        self.lo = lo - (self.hi - s);
    }

    /// Time elapsed since `t`, for `t` not after the clock.
    fn since(self, t: f64) -> f64 {
        (self.hi - t) + self.lo
    }
}

/// What a policy may observe: the clock and the present jobs with their
/// attained service, iterated in (arrival, id) order.
#[derive(Debug, Default)]
pub struct SystemState {
    clock: Clock,
    present: BTreeMap<usize, PresentJob>,
}

impl SystemState {
    /// Builds a state by hand, for probing a policy outside a run. Jobs are
    /// ordered by (arrival, id).
    pub fn snapshot(now: f64, present: impl IntoIterator<Item = PresentJob>) -> Self {
        let mut jobs: Vec<PresentJob> = present.into_iter().collect();
        jobs.sort_by(|a, b| {
            a.job
                .arrival
                .total_cmp(&b.job.arrival)
                .then_with(|| a.job.id.cmp(&b.job.id))
        });
        SystemState {
            clock: Clock::at(now),
            present: jobs.into_iter().enumerate().collect(),
        }
    }

    pub fn now(&self) -> f64 {
        self.clock.value()
    }

    pub fn present(&self) -> impl Iterator<Item = &PresentJob> + '_ {
        self.present.values()
    }

    pub fn len(&self) -> usize {
        self.present.len()
    }

    pub fn is_empty(&self) -> bool {
        self.present.is_empty()
    }
}

/// Behavioral contract every scheduling policy implements.
///
/// The engine calls `on_time_advanced` after serving an interval, then
/// `on_completion` for each finished job, then `on_arrival` for each new job,
/// then `allocate`/`next_internal_event` for the next interval.
pub trait Policy {
    fn name(&self) -> &str;

    fn on_arrival(&mut self, _job: &Job, _state: &SystemState) {}

    fn on_completion(&mut self, _id: JobId, _state: &SystemState) {}

    /// Rates for the interval starting now. Must only name present jobs and
    /// be work-conserving.
    fn allocate(&self, state: &SystemState) -> Allocation;

    /// Time from now until the next event the policy needs to react to, if
    /// any, assuming `allocation` stays in force.
    fn next_internal_event(&self, _state: &SystemState, _allocation: &Allocation) -> Option<f64> {
        None
    }

    /// Called once `dt` time units have elapsed, including idle periods.
    fn on_time_advanced(&mut self, _dt: f64) {}
}

impl<P: Policy + ?Sized> Policy for Box<P> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn on_arrival(&mut self, job: &Job, state: &SystemState) {
        (**self).on_arrival(job, state)
    }
    fn on_completion(&mut self, id: JobId, state: &SystemState) {
        (**self).on_completion(id, state)
    }
    fn allocate(&self, state: &SystemState) -> Allocation {
        (**self).allocate(state)
    }
    fn next_internal_event(&self, state: &SystemState, allocation: &Allocation) -> Option<f64> {
        (**self).next_internal_event(state, allocation)
    }
    fn on_time_advanced(&mut self, dt: f64) {
        (**self).on_time_advanced(dt)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    InvalidWorkload(#[from] ModelError),
    #[error("policy {policy} violated the allocation contract at t={time}: {reason}")]
    PolicyViolation { policy: String, time: f64, reason: String },
    #[error("policy {policy} stalled at t={time} with {present} jobs present")]
    Stall { policy: String, time: f64, present: usize },
    #[error("quantum must be positive, got {0}")]
    InvalidQuantum(f64),
}

/// Consecutive zero-length steps tolerated before declaring a stall.
const MAX_ZERO_STEPS: usize = 1_000;

struct Run<'a, P: Policy + ?Sized> {
    jobs: &'a [Job],
    slot_of: HashMap<JobId, usize>,
    state: SystemState,
    policy: &'a mut P,
    next_arrival: usize,
    completions: Vec<Option<(f64, f64)>>,
}

impl<'a, P: Policy + ?Sized> Run<'a, P> {
    fn new(jobs: &'a [Job], policy: &'a mut P) -> Self {
        Run {
            jobs,
            slot_of: jobs.iter().enumerate().map(|(i, j)| (j.id, i)).collect(),
            state: SystemState::default(),
            policy,
            next_arrival: 0,
            completions: vec![None; jobs.len()],
        }
    }

    fn violation(&self, reason: String) -> SimError {
        SimError::PolicyViolation {
            policy: self.policy.name().to_string(),
            time: self.state.now(),
            reason,
        }
    }

    fn pending_arrival(&self) -> Option<f64> {
        self.jobs.get(self.next_arrival).map(|j| j.arrival)
    }

    /// Checks the allocation and resolves it to present-job slots.
    fn resolve(&self, allocation: &Allocation) -> Result<Vec<(usize, f64)>, SimError> {
        let mut slots = Vec::with_capacity(allocation.len());
        for &(id, rate) in allocation.entries() {
            let slot = match self.slot_of.get(&id) {
                Some(&s) if self.state.present.contains_key(&s) => s,
                _ => return Err(self.violation(format!("job {id} is not present"))),
            };
            if !(rate > 0.0 && rate <= 1.0 + EPSILON) {
                return Err(self.violation(format!("job {id} has rate {rate}")));
            }
            if slots.iter().any(|&(s, _)| s == slot) {
                return Err(self.violation(format!("job {id} allocated twice")));
            }
            slots.push((slot, rate));
        }
        let total = allocation.total_rate();
        if total > 1.0 + EPSILON {
            return Err(self.violation(format!("rates sum to {total}")));
        }
        if !self.state.is_empty() {
            if slots.is_empty() {
                return Err(SimError::Stall {
                    policy: self.policy.name().to_string(),
                    time: self.state.now(),
                    present: self.state.len(),
                });
            }
            if total < 1.0 - EPSILON {
                return Err(self.violation(format!("not work-conserving, rates sum to {total}")));
            }
        }
        Ok(slots)
    }

    fn admit_arrivals_up_to(&mut self, t: f64) {
        while let Some(job) = self.jobs.get(self.next_arrival) {
            if job.arrival > t {
                break;
            }
            let slot = self.next_arrival;
            self.next_arrival += 1;
            self.state.present.insert(
                slot,
                PresentJob {
                    job: *job,
                    attained: 0.0,
                },
            );
            self.policy.on_arrival(job, &self.state);
        }
    }

    fn complete(&mut self, slot: usize) {
        let present = self
            .state
            .present
            .remove(&slot)
            .expect("completing job must be present");
        let clock = self.state.clock;
        let job = present.job;
        let sojourn = clock.since(job.arrival);
        // A unit-rate server cannot finish a job faster than its size; any
        // shortfall is rounding in the accumulated service.
        debug_assert!(
            sojourn >= job.size * (1.0 - 2.0 * EPSILON),
            "job {} finished early",
            job.id
        );
        self.completions[slot] = Some((clock.value().max(job.arrival + job.size), sojourn.max(job.size)));
        self.policy.on_completion(present.job.id, &self.state);
    }

    fn outcomes(self) -> Vec<JobOutcome> {
        self.jobs
            .iter()
            .zip(&self.completions)
            .map(|(job, c)| {
                let (completion, sojourn) = c.expect("every job completes");
                JobOutcome::with_sojourn(job, completion, sojourn)
            })
            .collect()
    }

    fn run_fluid(mut self) -> Result<Vec<JobOutcome>, SimError> {
        let mut zero_steps = 0;
        loop {
            if self.state.is_empty() {
                let Some(t) = self.pending_arrival() else { break };
                // Idle until the next arrival; the policy may still keep
                // internal clocks (PSBS's virtual system) running.
                let gap = (-self.state.clock.since(t)).max(0.0);
                if gap > 0.0 {
                    self.policy.on_time_advanced(gap);
                }
                self.state.clock = Clock::at(t);
                self.admit_arrivals_up_to(t);
                continue;
            }

            let allocation = self.policy.allocate(&self.state);
            let slots = self.resolve(&allocation)?;

            enum Next {
                Completion(usize),
                Arrival(f64),
                Internal,
            }
            let mut dt = f64::INFINITY;
            let mut next = Next::Internal;
            let mut first_done = None;
            for &(slot, rate) in &slots {
                let d = self.state.present[&slot].remaining().max(0.0) / rate;
                if d < dt {
                    dt = d;
                    first_done = Some((slot, rate, d));
                }
            }
            if let Some((slot, ..)) = first_done {
                next = Next::Completion(slot);
            }
            if let Some(t) = self.pending_arrival() {
                let d = -self.state.clock.since(t);
                if d < dt {
                    dt = d.max(0.0);
                    next = Next::Arrival(t);
                }
            }
            if let Some(d) = self.policy.next_internal_event(&self.state, &allocation) {
                if d < dt {
                    dt = d.max(0.0);
                    next = Next::Internal;
                }
            }
            // A completion that the step would leave within tolerance of done
            // takes over as the event, so the job is stamped at its full size
            // instead of finishing a rounding error early.
            if let Some((slot, rate, d)) = first_done {
                let p = &self.state.present[&slot];
                if !matches!(next, Next::Completion(_)) && p.remaining() - rate * dt <= EPSILON * p.job.size {
                    dt = d;
                    next = Next::Completion(slot);
                }
            }
            if !dt.is_finite() {
                return Err(SimError::Stall {
                    policy: self.policy.name().to_string(),
                    time: self.state.now(),
                    present: self.state.len(),
                });
            }

            if dt > 0.0 || matches!(next, Next::Completion(_)) {
                zero_steps = 0;
            } else {
                zero_steps += 1;
                if zero_steps > MAX_ZERO_STEPS {
                    return Err(SimError::Stall {
                        policy: self.policy.name().to_string(),
                        time: self.state.now(),
                        present: self.state.len(),
                    });
                }
            }

            for &(slot, rate) in &slots {
                let p = self.state.present.get_mut(&slot).unwrap();
                p.attained += rate * dt;
            }
            match next {
                Next::Arrival(t) => self.state.clock = Clock::at(t),
                _ => self.state.clock.advance(dt),
            }
            self.policy.on_time_advanced(dt);

            if let Next::Completion(slot) = next {
                let p = self.state.present.get_mut(&slot).unwrap();
                p.attained = p.job.size;
            }
            for &(slot, _) in &slots {
                if self.state.present[&slot].is_done() {
                    self.complete(slot);
                }
            }
            self.admit_arrivals_up_to(self.state.now());
        }
        Ok(self.outcomes())
    }

    fn run_quantum(mut self, quantum: f64) -> Result<Vec<JobOutcome>, SimError> {
        let mut step: u64 = 0;
        loop {
            self.admit_arrivals_up_to(self.state.now() + 1e-9 * quantum);
            if self.state.is_empty() {
                let Some(t) = self.pending_arrival() else { break };
                // Jump to the first step boundary at or after the arrival.
                let target = ((t / quantum - 1e-9).ceil() as u64).max(step + 1);
                let next_now = target as f64 * quantum;
                self.policy.on_time_advanced(next_now - self.state.now());
                step = target;
                self.state.clock = Clock::at(next_now);
                continue;
            }

            let allocation = self.policy.allocate(&self.state);
            let slots = self.resolve(&allocation)?;
            step += 1;
            let next_now = step as f64 * quantum;
            let dt = next_now - self.state.now();
            for &(slot, rate) in &slots {
                let p = self.state.present.get_mut(&slot).unwrap();
                p.attained += rate * dt;
            }
            self.state.clock = Clock::at(next_now);
            self.policy.on_time_advanced(dt);
            for &(slot, _) in &slots {
                if self.state.present[&slot].is_done() {
                    self.complete(slot);
                }
            }
        }
        Ok(self.outcomes())
    }
}

/// Simulates `workload` under `policy`, returning one outcome per job in
/// workload order.
pub fn run<P: Policy + ?Sized>(workload: &Workload, policy: &mut P) -> Result<Vec<JobOutcome>, SimError> {
    let workload = validate_workload(workload.clone())?;
    Run::new(&workload.jobs, policy).run_fluid()
}

/// Brute-force cross-check of [`run`]: time advances in fixed steps of
/// `quantum`, each allocated job receiving `rate * quantum` work per step.
/// Arrivals are admitted at the first step boundary at or after them and
/// completions are stamped at the end of the step in which they happen, so
/// completion times are accurate to a few quanta.
pub fn run_quantum_oracle<P: Policy + ?Sized>(
    workload: &Workload,
    policy: &mut P,
    quantum: f64,
) -> Result<Vec<JobOutcome>, SimError> {
    if !(quantum.is_finite() && quantum > 0.0) {
        return Err(SimError::InvalidQuantum(quantum));
    }
    let workload = validate_workload(workload.clone())?;
    Run::new(&workload.jobs, policy).run_quantum(quantum)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Gives the whole server to the first present job.
    struct Fifo;

    impl Policy for Fifo {
        fn name(&self) -> &str {
            "fifo"
        }
        fn allocate(&self, state: &SystemState) -> Allocation {
            state
                .present()
                .next()
                .map(|p| Allocation::single(p.id()))
                .unwrap_or_default()
        }
    }

    struct Lazy;

    impl Policy for Lazy {
        fn name(&self) -> &str {
            "lazy"
        }
        fn allocate(&self, _state: &SystemState) -> Allocation {
            Allocation::empty()
        }
    }

    struct Greedy;

    impl Policy for Greedy {
        fn name(&self) -> &str {
            "greedy"
        }
        fn allocate(&self, state: &SystemState) -> Allocation {
            Allocation::from_entries(state.present().map(|p| (p.id(), 1.0)).collect())
        }
    }

    struct Ghost;

    impl Policy for Ghost {
        fn name(&self) -> &str {
            "ghost"
        }
        fn allocate(&self, _state: &SystemState) -> Allocation {
            Allocation::single(JobId(99))
        }
    }

    #[test]
    fn single_job_runs_at_full_speed() {
        let w = Workload::manual(vec![Job::exact(0, 0.0, 5.0)]);
        let out = run(&w, &mut Fifo).unwrap();
        assert_eq!(out[0].completion, 5.0);
        assert_eq!(out[0].sojourn, 5.0);
        assert_eq!(out[0].slowdown, 1.0);
    }

    #[test]
    fn idle_gap_before_late_arrival() {
        let w = Workload::manual(vec![Job::exact(0, 0.0, 1.0), Job::exact(1, 10.0, 2.0)]);
        let out = run(&w, &mut Fifo).unwrap();
        assert_eq!(out[1].completion, 12.0);
    }

    #[test]
    fn quantum_single_job_bound() {
        let w = Workload::manual(vec![Job::exact(0, 0.0, 5.0)]);
        let out = run_quantum_oracle(&w, &mut Fifo, 1e-3).unwrap();
        assert!(out[0].completion >= 5.0 - 1e-9 && out[0].completion <= 5.001 + 1e-9);
    }

    #[test]
    fn contract_violations_are_reported() {
        let w = Workload::manual(vec![Job::exact(0, 0.0, 1.0), Job::exact(1, 0.0, 1.0)]);
        assert!(matches!(run(&w, &mut Lazy), Err(SimError::Stall { .. })));
        assert!(matches!(run(&w, &mut Greedy), Err(SimError::PolicyViolation { .. })));
        assert!(matches!(run(&w, &mut Ghost), Err(SimError::PolicyViolation { .. })));
        assert!(matches!(
            run_quantum_oracle(&w, &mut Fifo, 0.0),
            Err(SimError::InvalidQuantum(_))
        ));
    }

    #[test]
    fn invalid_workload_rejected() {
        let w = Workload::manual(vec![Job::exact(0, 0.0, -1.0)]);
        assert!(matches!(run(&w, &mut Fifo), Err(SimError::InvalidWorkload(_))));
    }

    #[test]
    fn empty_workload_yields_nothing() {
        assert!(run(&Workload::manual(vec![]), &mut Fifo).unwrap().is_empty());
    }
}
