//! Target bodies, shared with the seed-replay test in the main crate.

#![allow(dead_code)]

use mhr_acl::scenario::{parse_event_line, parse_scenario};
use mhr_acl::state::{check_invariants, hash_state};
use mhr_acl::{Machine, SystemState, Universe, UniverseSize};

pub const EVENT_UNIVERSE: UniverseSize = UniverseSize {
    people: 3,
    spaces: 3,
    records: 3,
    providers: 2,
    operators: 1,
};

/// Accepted scenarios render to text that parses back to the same scenario.
pub fn scenario(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(scenario) = parse_scenario(text) {
        let rendered = scenario.to_string();
        let again = parse_scenario(&rendered).expect("rendered scenarios parse");
        assert_eq!(again.universe, scenario.universe);
        assert_eq!(again.to_string(), rendered);
    }
}

/// Accepted event lines round-trip and name only in-universe identifiers.
pub fn event_line(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let universe = Universe::new(EVENT_UNIVERSE);
    if let Ok(Some((event, _))) = parse_event_line(text, &universe) {
        let again = parse_event_line(&event.to_string(), &universe).unwrap();
        assert_eq!(again, Some((event, None)));
        let machine = Machine::new(universe);
        machine.apply(&machine.initial_state(), &event).unwrap();
    }
}

/// Accepted state JSON is stable under re-serialisation.
pub fn state_json(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(state) = SystemState::from_json(text) {
        let json = state.to_json();
        let back = SystemState::from_json(&json).expect("canonical JSON parses");
        assert_eq!(back, state);
        assert_eq!(hash_state(&back), hash_state(&state));
        assert_eq!(back.encode_compact(), state.encode_compact());
        let _ = check_invariants(&state);
    }
}
