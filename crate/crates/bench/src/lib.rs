//! Shared fixtures for the criterion benches.

use lossftec::codes;
use lossftec::faultsim::{FaultEvent, FaultKind, FaultSchedule, Location};
use lossftec::StabilizerGroup;

pub fn code(name: &str) -> StabilizerGroup {
    codes::builtin(name).expect("bundled code")
}

/// A single data loss on the first controlled gate of the first generator.
pub fn single_loss(code: &StabilizerGroup) -> FaultSchedule {
    let g = &code.gens()[0];
    let gate_index = (code.n() - g.weight()) as u32;
    FaultSchedule::deterministic(vec![FaultEvent {
        location: Location { round: 1, generator_index: 1, gate_index },
        kind: FaultKind::Loss { operand: 1 },
    }])
}
