//! Bounded verification of the kernel.
//!
//! [`explore`] walks the reachable state graph breadth-first from the initial
//! state, one depth level at a time, checking the selected invariants on every
//! newly discovered state. States are deduplicated by [`hash_state`] and
//! confirmed equal by their compact encoding, so a digest collision can never
//! merge two distinct states. Successor generation and invariant checks run in
//! parallel, but discovery order is fixed by the frontier order and the
//! canonical event order, so the report does not depend on the thread count.
//!
//! [`fuzz`] samples seeded random walks instead, and additionally compares the
//! kernel's incrementally maintained access relations against
//! [`recompute_derived`] after every step.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use fnv::FnvBuildHasher;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::ids::{Universe, UniverseSize};
use crate::kernel::{all_instantiations, Event, Machine, Mutant, Trace};
use crate::state::{
    check_selected, hash_state, recompute_derived, InvariantId, InvariantViolation, SystemState,
};

/// Default bound on distinct states before exploration gives up.
pub const DEFAULT_STATE_CAP: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Random {
        seed: u64,
        traces: usize,
        length: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvariantSelection {
    All,
    Subset(Vec<InvariantId>),
}

impl InvariantSelection {
    pub fn ids(&self) -> Vec<InvariantId> {
        match self {
            InvariantSelection::All => InvariantId::ALL.to_vec(),
            InvariantSelection::Subset(ids) => ids.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckerConfig {
    pub universe: UniverseSize,
    pub max_depth: usize,
    pub mode: Mode,
    pub invariants: InvariantSelection,
    pub state_cap: usize,
    pub mutant: Option<Mutant>,
}

impl CheckerConfig {
    pub fn exhaustive(universe: UniverseSize, max_depth: usize) -> Self {
        CheckerConfig {
            universe,
            max_depth,
            mode: Mode::Exhaustive,
            invariants: InvariantSelection::All,
            state_cap: DEFAULT_STATE_CAP,
            mutant: None,
        }
    }

    pub fn random(universe: UniverseSize, seed: u64, traces: usize, length: usize) -> Self {
        CheckerConfig {
            universe,
            max_depth: length,
            mode: Mode::Random {
                seed,
                traces,
                length,
            },
            invariants: InvariantSelection::All,
            state_cap: DEFAULT_STATE_CAP,
            mutant: None,
        }
    }

    pub fn with_mutant(mut self, mutant: Option<Mutant>) -> Self {
        self.mutant = mutant;
        self
    }

    fn machine(&self) -> Machine {
        Machine::with_mutant(Universe::new(self.universe), self.mutant)
    }
}

#[derive(Debug, Error)]
pub enum CheckerError {
    #[error("state cap of {cap} distinct states exceeded at depth {depth}")]
    CapExceeded { cap: usize, depth: usize },
    #[error("invalid checker configuration: {0}")]
    InvalidConfig(String),
}

/// A path from the initial state to a state violating invariants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    #[serde(serialize_with = "serialize_trace")]
    pub trace: Trace,
    pub violated: Vec<InvariantViolation>,
}

/// A path after which incremental maintenance disagreed with the relational
/// definitions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Divergence {
    #[serde(serialize_with = "serialize_trace")]
    pub trace: Trace,
    pub fields: Vec<&'static str>,
}

fn serialize_trace<S: Serializer>(trace: &Trace, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_seq(trace.steps.iter().map(|s| s.event.to_string()))
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckerReport {
    pub mode: &'static str,
    pub universe: UniverseSize,
    pub max_depth: usize,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "serialize_mutant"
    )]
    pub mutant: Option<Mutant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traces: Option<usize>,
    pub states_visited: u64,
    pub transitions_fired: u64,
    pub depth_reached: usize,
    /// Exhaustive mode: no unexplored successors remained within the depth bound.
    pub exhausted: bool,
    /// Number of visited states that failed at least one invariant.
    pub violating_states: u64,
    /// The first (shortest, in canonical order) counterexample for each
    /// distinct set of violated invariants not already reported.
    pub violations: Vec<Counterexample>,
    pub divergences: Vec<Divergence>,
    /// Order-sensitive fold of every visited state's digest, as 16 hex digits.
    #[serde(serialize_with = "serialize_fingerprint")]
    pub fingerprint: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

fn serialize_mutant<S: Serializer>(m: &Option<Mutant>, serializer: S) -> Result<S::Ok, S::Error> {
    match m {
        Some(m) => serializer.serialize_str(m.name()),
        None => serializer.serialize_none(),
    }
}

fn serialize_fingerprint<S: Serializer>(fp: &u64, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_str(&format_args!("{fp:016x}"))
}

const FOLD_PRIME: u64 = 0x0000_0100_0000_01b3;
const FOLD_BASIS: u64 = 0xcbf2_9ce4_8422_2325;

fn fold(acc: u64, digest: u64) -> u64 {
    (acc ^ digest).wrapping_mul(FOLD_PRIME)
}

impl CheckerReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.divergences.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization is infallible")
    }
}

/// All events enabled in `state`, in canonical order.
pub fn enumerate_enabled(state: &SystemState, universe: &Universe) -> Vec<Event> {
    let machine = Machine::new(universe.clone());
    all_instantiations(universe)
        .into_iter()
        .filter(|e| matches!(machine.fire(state, e), Ok(Ok(_))))
        .collect()
}

fn successors(
    machine: &Machine,
    candidates: &[Event],
    state: &SystemState,
) -> Vec<(Event, SystemState)> {
    candidates
        .iter()
        .filter_map(|e| match machine.fire(state, e) {
            Ok(Ok(next)) => Some((*e, next)),
            _ => None,
        })
        .collect()
}

/// Keeps the first counterexample for each invariant not yet covered.
struct ViolationLog {
    covered: BTreeSet<InvariantId>,
    found: Vec<Counterexample>,
    states: u64,
}

impl ViolationLog {
    fn new() -> Self {
        ViolationLog {
            covered: BTreeSet::new(),
            found: Vec::new(),
            states: 0,
        }
    }

    fn wants(&mut self, violated: &[InvariantViolation]) -> bool {
        self.states += 1;
        violated.iter().any(|v| !self.covered.contains(&v.id))
    }

    fn push(&mut self, trace: Trace, violated: Vec<InvariantViolation>) {
        self.covered.extend(violated.iter().map(|v| v.id));
        self.found.push(Counterexample { trace, violated });
    }
}

struct Node {
    parent: u32,
    event: Option<Event>,
}

const ROOT: u32 = u32::MAX;

/// A successor with its digest and compact encoding.
type Discovered = (Event, SystemState, u64, Vec<u8>);

fn path_to(nodes: &[Node], mut index: u32) -> Vec<Event> {
    let mut events = Vec::new();
    while index != ROOT {
        let node = &nodes[index as usize];
        events.extend(node.event);
        index = node.parent;
    }
    events.reverse();
    events
}

/// Breadth-first exploration up to `cfg.max_depth`.
pub fn explore(cfg: &CheckerConfig) -> Result<CheckerReport, CheckerError> {
    if cfg.mode != Mode::Exhaustive {
        return Err(CheckerError::InvalidConfig(
            "explore requires exhaustive mode".into(),
        ));
    }
    let started = Instant::now();
    let machine = cfg.machine();
    let candidates = all_instantiations(machine.universe());
    let selected = cfg.invariants.ids();
    let initial = machine.initial_state();

    let mut nodes: Vec<Node> = Vec::new();
    let mut encodings: Vec<Box<[u8]>> = Vec::new();
    let mut index: HashMap<u64, Vec<u32>, FnvBuildHasher> = HashMap::default();
    let mut log = ViolationLog::new();
    let mut transitions = 0u64;
    let mut depth_reached = 0;

    nodes.push(Node {
        parent: ROOT,
        event: None,
    });
    encodings.push(initial.encode_compact().into_boxed_slice());
    let root_digest = hash_state(&initial);
    index.entry(root_digest).or_default().push(0);
    let mut fingerprint = fold(FOLD_BASIS, root_digest);

    let record =
        |log: &mut ViolationLog, nodes: &[Node], at: u32, violated: Vec<InvariantViolation>| {
            if log.wants(&violated) {
                let (trace, _) = machine
                    .record(machine.initial_state(), path_to(nodes, at))
                    .expect("explored events are within the universe");
                log.push(trace, violated);
            }
        };

    let mut frontier: Vec<(u32, SystemState)> = Vec::new();
    let root_violations = check_selected(&initial, &selected);
    if root_violations.is_empty() {
        frontier.push((0, initial));
    } else {
        record(&mut log, &nodes, 0, root_violations);
    }

    for depth in 0..cfg.max_depth {
        if frontier.is_empty() {
            break;
        }
        let expanded: Vec<Vec<Discovered>> = frontier
            .par_iter()
            .map(|(_, state)| {
                successors(&machine, &candidates, state)
                    .into_iter()
                    .map(|(e, next)| {
                        let digest = hash_state(&next);
                        let bytes = next.encode_compact();
                        (e, next, digest, bytes)
                    })
                    .collect()
            })
            .collect();

        let mut discovered: Vec<(u32, SystemState)> = Vec::new();
        for ((parent, _), succs) in frontier.iter().zip(expanded) {
            transitions += succs.len() as u64;
            for (event, next, digest, bytes) in succs {
                let bucket = index.entry(digest).or_default();
                if bucket.iter().any(|&i| *encodings[i as usize] == *bytes) {
                    continue;
                }
                let id = nodes.len() as u32;
                bucket.push(id);
                fingerprint = fold(fingerprint, digest);
                nodes.push(Node {
                    parent: *parent,
                    event: Some(event),
                });
                encodings.push(bytes.into_boxed_slice());
                discovered.push((id, next));
                if nodes.len() > cfg.state_cap {
                    return Err(CheckerError::CapExceeded {
                        cap: cfg.state_cap,
                        depth: depth + 1,
                    });
                }
            }
        }
        if discovered.is_empty() {
            frontier.clear();
            break;
        }
        depth_reached = depth + 1;

        let verdicts: Vec<Vec<InvariantViolation>> = discovered
            .par_iter()
            .map(|(_, state)| check_selected(state, &selected))
            .collect();
        frontier = Vec::with_capacity(discovered.len());
        for ((id, state), violated) in discovered.into_iter().zip(verdicts) {
            if violated.is_empty() {
                frontier.push((id, state));
            } else {
                record(&mut log, &nodes, id, violated);
            }
        }
    }

    // Exhausted when nothing reachable was left unexpanded at the bound.
    let exhausted = frontier.is_empty()
        || frontier.iter().all(|(_, s)| {
            successors(&machine, &candidates, s)
                .into_iter()
                .all(|(_, next)| {
                    let bytes = next.encode_compact();
                    index
                        .get(&hash_state(&next))
                        .is_some_and(|b| b.iter().any(|&i| *encodings[i as usize] == *bytes))
                })
        });

    Ok(CheckerReport {
        mode: "exhaustive",
        universe: cfg.universe,
        max_depth: cfg.max_depth,
        mutant: cfg.mutant,
        seed: None,
        traces: None,
        states_visited: nodes.len() as u64,
        transitions_fired: transitions,
        depth_reached,
        exhausted,
        violating_states: log.states,
        violations: log.found,
        divergences: Vec::new(),
        fingerprint,
        elapsed: started.elapsed(),
    })
}

/// Names of the derived relations where `state` disagrees with its
/// recomputation.
pub fn derived_mismatches(state: &SystemState) -> Vec<&'static str> {
    let oracle = recompute_derived(state);
    let mut fields = Vec::new();
    if oracle.sp_mhr_access != state.sp_mhr_access {
        fields.push("sp_mhr_access");
    }
    if oracle.general_sp_access != state.general_sp_access {
        fields.push("general_sp_access");
    }
    if oracle.restricted_sp_access != state.restricted_sp_access {
        fields.push("restricted_sp_access");
    }
    if oracle.general_nominated_access != state.general_nominated_access {
        fields.push("general_nominated_access");
    }
    if oracle.restricted_nominated_access != state.restricted_nominated_access {
        fields.push("restricted_nominated_access");
    }
    fields
}

enum WalkEnd {
    Clean,
    Violation(Vec<InvariantViolation>),
    Divergence(Vec<&'static str>),
}

struct Walk {
    events: Vec<Event>,
    visited: u64,
    fingerprint: u64,
    end: WalkEnd,
}

fn walk(
    machine: &Machine,
    candidates: &[Event],
    selected: &[InvariantId],
    seed: u64,
    stream: u64,
    length: usize,
) -> Walk {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut state = machine.initial_state();
    let mut events = Vec::new();
    let mut visited = 1;
    let mut fingerprint = fold(FOLD_BASIS, hash_state(&state));
    let check = |s: &SystemState| {
        let violated = check_selected(s, selected);
        if !violated.is_empty() {
            return Some(WalkEnd::Violation(violated));
        }
        let fields = derived_mismatches(s);
        (!fields.is_empty()).then_some(WalkEnd::Divergence(fields))
    };
    if let Some(end) = check(&state) {
        return Walk {
            events,
            visited,
            fingerprint,
            end,
        };
    }
    for _ in 0..length {
        let mut enabled = successors(machine, candidates, &state);
        if enabled.is_empty() {
            break;
        }
        let pick = rng.gen_range(0..enabled.len());
        let (event, next) = enabled.swap_remove(pick);
        events.push(event);
        state = next;
        visited += 1;
        fingerprint = fold(fingerprint, hash_state(&state));
        if let Some(end) = check(&state) {
            return Walk {
                events,
                visited,
                fingerprint,
                end,
            };
        }
    }
    Walk {
        events,
        visited,
        fingerprint,
        end: WalkEnd::Clean,
    }
}

/// Seeded random walks, each step invariant- and oracle-checked.
pub fn fuzz(cfg: &CheckerConfig) -> Result<CheckerReport, CheckerError> {
    let Mode::Random {
        seed,
        traces,
        length,
    } = cfg.mode
    else {
        return Err(CheckerError::InvalidConfig(
            "fuzz requires random mode".into(),
        ));
    };
    let started = Instant::now();
    let machine = cfg.machine();
    let candidates = all_instantiations(machine.universe());
    let selected = cfg.invariants.ids();

    let walks: Vec<Walk> = (0..traces as u64)
        .into_par_iter()
        .map(|i| walk(&machine, &candidates, &selected, seed, i, length))
        .collect();

    let mut log = ViolationLog::new();
    let mut divergences = Vec::new();
    let (mut visited, mut transitions, mut depth_reached) = (0u64, 0u64, 0usize);
    let mut fingerprint = FOLD_BASIS;
    let replay = |events: &[Event]| {
        machine
            .record(machine.initial_state(), events.iter().copied())
            .expect("sampled events are within the universe")
            .0
    };
    for w in walks {
        visited += w.visited;
        fingerprint = fold(fingerprint, w.fingerprint);
        transitions += w.events.len() as u64;
        depth_reached = depth_reached.max(w.events.len());
        match w.end {
            WalkEnd::Clean => {}
            WalkEnd::Violation(violated) => {
                if log.wants(&violated) {
                    log.push(replay(&w.events), violated);
                }
            }
            WalkEnd::Divergence(fields) => {
                if divergences.is_empty() {
                    divergences.push(Divergence {
                        trace: replay(&w.events),
                        fields,
                    });
                }
            }
        }
    }

    Ok(CheckerReport {
        mode: "random",
        universe: cfg.universe,
        max_depth: length,
        mutant: cfg.mutant,
        seed: Some(seed),
        traces: Some(traces),
        states_visited: visited,
        transitions_fired: transitions,
        depth_reached,
        exhausted: false,
        violating_states: log.states,
        violations: log.found,
        divergences,
        fingerprint,
        elapsed: started.elapsed(),
    })
}

/// Dispatches on `cfg.mode`.
pub fn run(cfg: &CheckerConfig) -> Result<CheckerReport, CheckerError> {
    match cfg.mode {
        Mode::Exhaustive => explore(cfg),
        Mode::Random { .. } => fuzz(cfg),
    }
}
