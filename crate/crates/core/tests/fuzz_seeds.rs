//! Replays the checked-in fuzz corpora through the fuzz target bodies.

#[path = "../fuzz/checks.rs"]
mod checks;

use std::fs;
use std::path::Path;

use proptest::prelude::*;
use proptest::sample::Index;

fn seeds(target: &str) -> Vec<Vec<u8>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fuzz/corpus")
        .join(target);
    let mut paths: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    paths.iter().map(|p| fs::read(p).unwrap()).collect()
}

fn replay(target: &str, check: fn(&[u8])) {
    let seeds = seeds(target);
    assert!(seeds.len() >= 5, "{target}: only {} seeds", seeds.len());
    for seed in &seeds {
        check(seed);
    }
}

#[derive(Debug, Clone)]
enum Edit {
    Flip(Index, u8),
    Insert(Index, u8),
    Delete(Index),
    Splice(Index, Index, Index),
}

fn edit() -> impl Strategy<Value = Edit> {
    // Bias inserted bytes towards the scenario alphabet.
    let byte = prop_oneof![
        proptest::sample::select(b" \n#=0123456789promsu_{}[],\":-".to_vec()),
        any::<u8>(),
    ];
    prop_oneof![
        (any::<Index>(), byte.clone()).prop_map(|(i, b)| Edit::Flip(i, b)),
        (any::<Index>(), byte).prop_map(|(i, b)| Edit::Insert(i, b)),
        any::<Index>().prop_map(Edit::Delete),
        (any::<Index>(), any::<Index>(), any::<Index>())
            .prop_map(|(a, b, c)| Edit::Splice(a, b, c)),
    ]
}

/// Applies `edits` to a copy of one seed, in the manner of a mutating fuzzer.
fn mutate(seeds: &[Vec<u8>], pick: &Index, edits: &[Edit]) -> Vec<u8> {
    let mut data = pick.get(seeds).clone();
    for e in edits {
        let n = data.len();
        match e {
            Edit::Flip(i, b) if n > 0 => data[i.index(n)] = *b,
            Edit::Insert(i, b) => data.insert(i.index(n + 1), *b),
            Edit::Delete(i) if n > 0 => {
                data.remove(i.index(n));
            }
            Edit::Splice(from, to, other) => {
                let donor = other.get(seeds);
                if !donor.is_empty() {
                    let (a, b) = (from.index(donor.len()), to.index(donor.len()));
                    let at = from.index(n + 1);
                    data.splice(at..at, donor[a.min(b)..a.max(b)].iter().copied());
                }
            }
            _ => {}
        }
    }
    data
}

fn mutations() -> impl Strategy<Value = (Index, Vec<Edit>)> {
    (any::<Index>(), proptest::collection::vec(edit(), 1..8))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 2000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn mutated_scenarios((pick, edits) in mutations()) {
        checks::scenario(&mutate(&seeds("parse_scenario"), &pick, &edits));
    }

    #[test]
    fn mutated_event_lines((pick, edits) in mutations()) {
        checks::event_line(&mutate(&seeds("parse_event_line"), &pick, &edits));
    }

    #[test]
    fn mutated_state_json((pick, edits) in mutations()) {
        checks::state_json(&mutate(&seeds("state_json"), &pick, &edits));
    }
}

#[test]
fn parse_scenario_seeds() {
    replay("parse_scenario", checks::scenario);
}

#[test]
fn parse_event_line_seeds() {
    replay("parse_event_line", checks::event_line);
}

#[test]
fn state_json_seeds() {
    replay("state_json", checks::state_json);
}
