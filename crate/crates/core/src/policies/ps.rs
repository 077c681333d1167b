use crate::engine::{Policy, SystemState};
use crate::model::Allocation;

/// Equal share for every present job.
#[derive(Debug, Default, Clone, Copy)]
pub struct ProcessorSharing;

impl Policy for ProcessorSharing {
    fn name(&self) -> &str {
        "ps"
    }

    fn allocate(&self, state: &SystemState) -> Allocation {
        Allocation::shared(state.present().map(|p| p.id()))
    }
}
