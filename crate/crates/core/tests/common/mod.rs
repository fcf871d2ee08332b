#![allow(dead_code)]

pub mod laws;

use mhr_acl::UniverseSize;

/// The universe used by the acceptance runs.
pub const ACCEPTANCE: UniverseSize = UniverseSize {
    people: 2,
    spaces: 2,
    records: 2,
    providers: 1,
    operators: 1,
};

/// Distinct states reachable within six events in [`ACCEPTANCE`].
pub const ACCEPTANCE_STATES_DEPTH_6: u64 = 4490;
/// Enabled transitions fired from the states expanded in that run.
pub const ACCEPTANCE_TRANSITIONS_DEPTH_6: u64 = 26779;
/// Every state reachable in [`ACCEPTANCE`], and the BFS depth of the farthest.
pub const ACCEPTANCE_REACHABLE_STATES: u64 = 106_946;
pub const ACCEPTANCE_DIAMETER: usize = 15;
