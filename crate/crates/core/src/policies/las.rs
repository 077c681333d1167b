use crate::engine::{Policy, SystemState};
use crate::model::Allocation;

use super::nearly_equal;

/// Least attained service (foreground-background): the jobs with the least
/// service so far share the server equally. Attained levels within a relative
/// `EPSILON` of the minimum count as tied.
#[derive(Debug, Default, Clone, Copy)]
pub struct LeastAttained;

fn min_attained(state: &SystemState) -> Option<f64> {
    state.present().map(|p| p.attained).min_by(f64::total_cmp)
}

impl Policy for LeastAttained {
    fn name(&self) -> &str {
        "las"
    }

    fn allocate(&self, state: &SystemState) -> Allocation {
        let Some(min) = min_attained(state) else {
            return Allocation::empty();
        };
        Allocation::shared(
            state
                .present()
                .filter(|p| nearly_equal(p.attained, min))
                .map(|p| p.id()),
        )
    }

    /// When the served group catches up with the next attained level.
    fn next_internal_event(&self, state: &SystemState, allocation: &Allocation) -> Option<f64> {
        let min = min_attained(state)?;
        let level = state
            .present()
            .map(|p| p.attained)
            .filter(|&a| !nearly_equal(a, min))
            .min_by(f64::total_cmp)?;
        Some((level - min) * allocation.len() as f64)
    }
}
