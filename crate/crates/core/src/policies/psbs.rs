//! PSBS / FSP: serve jobs in the order they would finish in a virtual
//! processor-sharing system fed the size estimates. Jobs that have left the
//! virtual system but are still running for real ("late" jobs, only possible
//! with under-estimates) share the server equally and take precedence.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use crate::engine::{Policy, SystemState};
use crate::model::{Allocation, Job, JobId};

use super::{nearly_equal, SizeInfo};

#[derive(Copy, Clone, Debug)]
struct VirtualKey {
    /// Virtual-clock value at which the job leaves the virtual system.
    finish: f64,
    arrival: f64,
    id: JobId,
}

impl PartialEq for VirtualKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for VirtualKey {}

impl PartialOrd for VirtualKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VirtualKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.finish
            .total_cmp(&other.finish)
            .then_with(|| self.arrival.total_cmp(&other.arrival))
            .then_with(|| self.id.cmp(&other.id))
    }
}

/// Reference processor-sharing system over estimated sizes.
///
/// Tracked with a virtual clock that advances at rate 1/k while k virtual
/// jobs are present; a job entering at clock value v with work w departs when
/// the clock reaches v + w, so its virtual remaining work is that tag minus
/// the current clock.
#[derive(Debug, Default, Clone)]
pub struct VirtualPs {
    clock: f64,
    jobs: BTreeSet<VirtualKey>,
    keys: HashMap<JobId, VirtualKey>,
}

impl VirtualPs {
    pub fn new() -> Self {
        VirtualPs::default()
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn contains(&self, id: JobId) -> bool {
        self.keys.contains_key(&id)
    }

    pub fn insert(&mut self, job: &Job, work: f64) {
        let key = VirtualKey {
            finish: self.clock + work,
            arrival: job.arrival,
            id: job.id,
        };
        self.jobs.insert(key);
        self.keys.insert(job.id, key);
    }

    pub fn remaining(&self, id: JobId) -> Option<f64> {
        self.keys.get(&id).map(|k| k.finish - self.clock)
    }

    /// Time until the next virtual departure.
    pub fn next_departure_in(&self) -> Option<f64> {
        let first = self.jobs.first()?;
        Some(((first.finish - self.clock) * self.jobs.len() as f64).max(0.0))
    }

    /// Advances the virtual system by `dt`, returning departed jobs in
    /// departure order. A job departs once the clock reaches its finish tag.
    pub fn advance(&mut self, dt: f64) -> Vec<JobId> {
        self.advance_keys(dt).into_iter().map(|k| k.id).collect()
    }

    fn advance_keys(&mut self, dt: f64) -> Vec<VirtualKey> {
        let mut departed = Vec::new();
        let mut left = dt;
        while let Some(first) = self.jobs.first().copied() {
            let k = self.jobs.len() as f64;
            let gap = (first.finish - self.clock).max(0.0) * k;
            if gap <= left {
                self.clock = self.clock.max(first.finish);
                left -= gap;
                self.depart(first, &mut departed);
            } else {
                self.clock += left / k;
                break;
            }
        }
        departed
    }

    fn depart(&mut self, key: VirtualKey, departed: &mut Vec<VirtualKey>) {
        self.jobs.remove(&key);
        self.keys.remove(&key.id);
        departed.push(key);
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct ArrivalKey(u64, JobId);

fn arrival_key(job: &Job) -> ArrivalKey {
    // Arrivals are non-negative, so the IEEE bit pattern orders correctly.
    ArrivalKey(job.arrival.to_bits(), job.id)
}

/// PSBS with unit weights; reading exact sizes it is FSP.
#[derive(Debug, Clone)]
pub struct Psbs {
    name: &'static str,
    info: SizeInfo,
    virtual_ps: VirtualPs,
    /// Really present and still in the virtual system, by virtual finish.
    early: BTreeSet<VirtualKey>,
    /// Really present but already departed from the virtual system.
    late: BTreeSet<ArrivalKey>,
    present: HashMap<JobId, ArrivalKey>,
}

impl Psbs {
    pub fn new(name: &'static str, info: SizeInfo) -> Self {
        Psbs {
            name,
            info,
            virtual_ps: VirtualPs::new(),
            early: BTreeSet::new(),
            late: BTreeSet::new(),
            present: HashMap::new(),
        }
    }

    pub fn virtual_system(&self) -> &VirtualPs {
        &self.virtual_ps
    }

    pub fn late_jobs(&self) -> impl Iterator<Item = JobId> + '_ {
        self.late.iter().map(|k| k.1)
    }
}

impl Policy for Psbs {
    fn name(&self) -> &str {
        self.name
    }

    fn on_arrival(&mut self, job: &Job, _state: &SystemState) {
        self.virtual_ps.insert(job, self.info.of(job));
        let key = self.virtual_ps.keys[&job.id];
        self.early.insert(key);
        self.present.insert(job.id, arrival_key(job));
    }

    fn on_completion(&mut self, id: JobId, _state: &SystemState) {
        let Some(akey) = self.present.remove(&id) else {
            return;
        };
        if !self.late.remove(&akey) {
            if let Some(vkey) = self.virtual_ps.keys.get(&id) {
                self.early.remove(vkey);
            }
        }
        // A job finishing for real stays in the virtual system until its
        // virtual work runs out.
    }

    fn allocate(&self, _state: &SystemState) -> Allocation {
        if !self.late.is_empty() {
            return Allocation::shared(self.late.iter().map(|k| k.1));
        }
        let Some(first) = self.early.first() else {
            return Allocation::empty();
        };
        // Equal virtual remaining work (up to rounding in the finish tags) is
        // a tie, broken by arrival order.
        let clock = self.virtual_ps.clock;
        let lead = first.finish - clock;
        let best = self
            .early
            .iter()
            .take_while(|k| nearly_equal(k.finish - clock, lead))
            .min_by(|a, b| a.arrival.total_cmp(&b.arrival).then(a.id.cmp(&b.id)))
            .unwrap_or(first);
        Allocation::single(best.id)
    }

    fn next_internal_event(&self, _state: &SystemState, _allocation: &Allocation) -> Option<f64> {
        self.virtual_ps.next_departure_in()
    }

    fn on_time_advanced(&mut self, dt: f64) {
        for vkey in self.virtual_ps.advance_keys(dt) {
            if let Some(&akey) = self.present.get(&vkey.id) {
                self.early.remove(&vkey);
                self.late.insert(akey);
            }
        }
    }
}
