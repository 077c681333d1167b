//! Comparison splitting (CS) and its LIFO-last-class variant (MCSS).
//!
//! A new job's class is the number of the last `r` submitted jobs with a
//! strictly smaller size; the smallest non-empty class is served, FIFO within
//! a class. MCSS serves the last class (index `r`) newest-first instead.

use std::collections::{HashMap, VecDeque};

use crate::engine::{Policy, SystemState};
use crate::model::{Allocation, Job, JobId};

use super::SizeInfo;

pub const DEFAULT_WINDOW: usize = 10;

/// Number of entries of `recent` strictly smaller than `new_size`.
pub fn assign_class<'a, I>(recent: I, new_size: f64) -> usize
where
    I: IntoIterator<Item = &'a f64>,
{
    recent.into_iter().filter(|&&s| s < new_size).count()
}

#[derive(Debug, Clone)]
pub struct ClassQueues {
    window: usize,
    recent: VecDeque<f64>,
    queues: Vec<VecDeque<JobId>>,
    class_of: HashMap<JobId, usize>,
    lifo_last: bool,
}

impl ClassQueues {
    pub fn new(window: usize, lifo_last: bool) -> Self {
        ClassQueues {
            window,
            recent: VecDeque::with_capacity(window),
            queues: vec![VecDeque::new(); window + 1],
            class_of: HashMap::new(),
            lifo_last,
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Classifies against the current window, then records `size` in it
    /// (evicting the oldest entry at capacity). Returns the class.
    pub fn submit(&mut self, id: JobId, size: f64) -> usize {
        let class = assign_class(&self.recent, size);
        if self.window > 0 {
            if self.recent.len() == self.window {
                self.recent.pop_front();
            }
            self.recent.push_back(size);
        }
        self.queues[class].push_back(id);
        self.class_of.insert(id, class);
        class
    }

    pub fn remove(&mut self, id: JobId) {
        if let Some(class) = self.class_of.remove(&id) {
            let q = &mut self.queues[class];
            if let Some(pos) = q.iter().position(|&j| j == id) {
                q.remove(pos);
            }
        }
    }

    pub fn class_of(&self, id: JobId) -> Option<usize> {
        self.class_of.get(&id).copied()
    }

    /// Job to serve: head of the smallest non-empty queue.
    pub fn head(&self) -> Option<JobId> {
        let (class, q) = self.queues.iter().enumerate().find(|(_, q)| !q.is_empty())?;
        if self.lifo_last && class == self.window {
            q.back().copied()
        } else {
            q.front().copied()
        }
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonSplitting {
    name: &'static str,
    info: SizeInfo,
    queues: ClassQueues,
}

impl ComparisonSplitting {
    pub fn new(name: &'static str, info: SizeInfo, window: usize, lifo_last: bool) -> Self {
        ComparisonSplitting {
            name,
            info,
            queues: ClassQueues::new(window, lifo_last),
        }
    }

    pub fn queues(&self) -> &ClassQueues {
        &self.queues
    }
}

impl Policy for ComparisonSplitting {
    fn name(&self) -> &str {
        self.name
    }

    fn on_arrival(&mut self, job: &Job, _state: &SystemState) {
        self.queues.submit(job.id, self.info.of(job));
    }

    fn on_completion(&mut self, id: JobId, _state: &SystemState) {
        self.queues.remove(id);
    }

    fn allocate(&self, _state: &SystemState) -> Allocation {
        self.queues.head().map(Allocation::single).unwrap_or_default()
    }
}
