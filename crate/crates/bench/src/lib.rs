//! Shared fixtures for the criterion benchmarks.

use tmspace_core::cleanser::{SequenceKind, SequenceProfile};
use tmspace_core::harness::{default_inputs, run_machine, MachineRuns};
use tmspace_core::rulecodec::SpaceParams;

pub const BOUND: u64 = 1000;

/// Raw runs of rules in (2,2) that need cleansing.
pub fn censored_machines() -> Vec<MachineRuns> {
    let p = SpaceParams::binary(2);
    [378, 1351, 2205, 2240]
        .iter()
        .map(|&r| run_machine(p, r, &default_inputs(), BOUND, true))
        .collect()
}

pub fn runtime_profiles(machines: &[MachineRuns]) -> Vec<SequenceProfile> {
    machines.iter().map(|m| m.profile(SequenceKind::Runtime)).collect()
}
