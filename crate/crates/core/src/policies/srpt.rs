use crate::engine::{Policy, PresentJob, SystemState};
use crate::model::Allocation;

use super::{ranks_ahead, SizeInfo};

/// Shortest remaining processing time. With estimates the remaining figure
/// `estimate - attained` can go negative; such jobs rank first and are never
/// preempted, which is the clogging behavior under-estimated large jobs cause.
#[derive(Debug, Clone)]
pub struct ShortestRemaining {
    name: &'static str,
    info: SizeInfo,
}

impl ShortestRemaining {
    pub fn new(name: &'static str, info: SizeInfo) -> Self {
        ShortestRemaining { name, info }
    }

    fn remaining(&self, p: &PresentJob) -> f64 {
        self.info.of(&p.job) - p.attained
    }
}

impl Policy for ShortestRemaining {
    fn name(&self) -> &str {
        self.name
    }

    fn allocate(&self, state: &SystemState) -> Allocation {
        let mut best: Option<&PresentJob> = None;
        for p in state.present() {
            best = match best {
                Some(b) if !ranks_ahead(self.remaining(p), &p.job, self.remaining(b), &b.job) => Some(b),
                _ => Some(p),
            };
        }
        best.map(|p| Allocation::single(p.id())).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run;
    use crate::model::{Job, Workload};

    fn srpt() -> ShortestRemaining {
        ShortestRemaining::new("srpt", SizeInfo::Exact)
    }

    #[test]
    fn running_job_keeps_server_when_shorter() {
        let w = Workload::manual(vec![Job::exact(0, 0.0, 10.0), Job::exact(1, 5.0, 6.0)]);
        let out = run(&w, &mut srpt()).unwrap();
        assert_eq!(out[0].completion, 10.0);
        assert_eq!(out[1].completion, 16.0);
    }

    #[test]
    fn short_newcomer_preempts() {
        let w = Workload::manual(vec![Job::exact(0, 0.0, 10.0), Job::exact(1, 1.0, 2.0)]);
        let out = run(&w, &mut srpt()).unwrap();
        assert_eq!(out[1].completion, 3.0);
        assert_eq!(out[0].completion, 12.0);
        let mst = (out[0].sojourn + out[1].sojourn) / 2.0;
        assert_eq!(mst, 7.0);
    }

    #[test]
    fn underestimated_job_clogs_srpte() {
        let w = Workload::manual(vec![Job::new(0, 0.0, 100.0, 2.0), Job::new(1, 1.0, 1.0, 1.0)]);
        let out = run(&w, &mut ShortestRemaining::new("srpte", SizeInfo::Estimated)).unwrap();
        assert!((out[0].completion - 100.0).abs() < 1e-9);
        assert!((out[1].completion - 101.0).abs() < 1e-9);
    }

    #[test]
    fn negative_remaining_ranks_first() {
        let over = PresentJob {
            job: Job::new(0, 0.0, 10.0, 1.0),
            attained: 3.0,
        };
        let fresh = PresentJob {
            job: Job::new(1, 1.0, 0.5, 0.5),
            attained: 0.0,
        };
        let s = SystemState::snapshot(3.0, [over, fresh]);
        let a = ShortestRemaining::new("srpte", SizeInfo::Estimated).allocate(&s);
        assert_eq!(a, Allocation::single(over.id()));
    }
}
