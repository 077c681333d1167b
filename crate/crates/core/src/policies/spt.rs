use crate::engine::{Policy, PresentJob, SystemState};
use crate::model::Allocation;

use super::{ranks_ahead, SizeInfo};

/// Preemptive shortest processing time: static priority on (estimated) size,
/// attained service never consulted.
#[derive(Debug, Clone)]
pub struct ShortestProcessingTime {
    name: &'static str,
    info: SizeInfo,
}

impl ShortestProcessingTime {
    pub fn new(name: &'static str, info: SizeInfo) -> Self {
        ShortestProcessingTime { name, info }
    }
}

impl Policy for ShortestProcessingTime {
    fn name(&self) -> &str {
        self.name
    }

    fn allocate(&self, state: &SystemState) -> Allocation {
        let key = |p: &PresentJob| self.info.of(&p.job);
        let mut best: Option<&PresentJob> = None;
        for p in state.present() {
            best = match best {
                Some(b) if !ranks_ahead(key(p), &p.job, key(b), &b.job) => Some(b),
                _ => Some(p),
            };
        }
        best.map(|p| Allocation::single(p.id())).unwrap_or_default()
    }
}
