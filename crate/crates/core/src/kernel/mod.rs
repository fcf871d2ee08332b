//! The guarded-event transition system.
//!
//! [`Machine::apply`] evaluates an event's guards in their listed order
//! against the pre-state. If one fails the state is returned untouched along
//! with the failing guard; otherwise every action is computed from the
//! pre-state and the successor is returned. The redundant access relations
//! are maintained incrementally by each event; `state::recompute_derived`
//! is the independent oracle for that maintenance.

mod event;
mod mutant;
mod transitions;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::ids::{ActorRef, PersonId, Universe};
use crate::relations::FiniteSet;
use crate::state::{self, StateError, SystemState};

pub use event::{all_instantiations, Arg, ArgKind, Event, EVENT_SIGNATURES};
pub use mutant::Mutant;

/// Why an event was not enabled.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GuardError {
    pub event: &'static str,
    pub guard: &'static str,
    pub detail: &'static str,
}

impl fmt::Display for GuardError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} rejected by {}: {}",
            self.event, self.guard, self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("event `{event}` names identifier outside the universe")]
    UnknownIdentifier { event: String },
    #[error(transparent)]
    State(#[from] StateError),
}

/// Result of submitting an event.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    Applied,
    Rejected(GuardError),
}

impl Outcome {
    pub fn is_applied(&self) -> bool {
        matches!(self, Outcome::Applied)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub event: Event,
    pub outcome: Outcome,
}

/// A recorded run: an initial state and the outcome of every event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial: SystemState,
    pub steps: Vec<TraceStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("step {step} (`{event}`): recorded {recorded:?}, replay gave {actual:?}")]
    Divergence {
        step: usize,
        event: String,
        recorded: Box<Outcome>,
        actual: Box<Outcome>,
    },
    #[error("step {step}: {source}")]
    Kernel { step: usize, source: KernelError },
}

/// The machine: a fixed universe plus an optional seeded fault.
#[derive(Debug, Clone)]
pub struct Machine {
    universe: Universe,
    mutant: Option<Mutant>,
}

impl Machine {
    pub fn new(universe: Universe) -> Self {
        Machine {
            universe,
            mutant: None,
        }
    }

    /// A machine with a deliberately broken event, for checker validation.
    pub fn with_mutant(universe: Universe, mutant: Option<Mutant>) -> Self {
        Machine { universe, mutant }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn mutant(&self) -> Option<Mutant> {
        self.mutant
    }

    /// The empty state with `o1..oK` as system operators.
    pub fn initial_state(&self) -> SystemState {
        state::initial_state(&self.universe, &self.universe.operators())
            .expect("universe operators are people")
    }

    /// Applies `event`; returns the successor, or the unchanged state and the
    /// first failing guard.
    pub fn apply(
        &self,
        state: &SystemState,
        event: &Event,
    ) -> Result<(SystemState, Outcome), KernelError> {
        Ok(match self.fire(state, event)? {
            Ok(next) => (next, Outcome::Applied),
            Err(guard) => (state.clone(), Outcome::Rejected(guard)),
        })
    }

    /// Like [`Machine::apply`] but without cloning the state on rejection.
    pub fn fire(
        &self,
        state: &SystemState,
        event: &Event,
    ) -> Result<Result<SystemState, GuardError>, KernelError> {
        if !event.in_universe(&self.universe) {
            return Err(KernelError::UnknownIdentifier {
                event: event.to_string(),
            });
        }
        Ok(transitions::fire(self, state, event))
    }

    /// Folds the trace's events over its initial state, checking each
    /// recorded outcome.
    pub fn replay(&self, trace: &Trace) -> Result<SystemState, ReplayError> {
        let mut current = trace.initial.clone();
        for (step, recorded) in trace.steps.iter().enumerate() {
            let (next, actual) = self
                .apply(&current, &recorded.event)
                .map_err(|source| ReplayError::Kernel { step, source })?;
            if actual != recorded.outcome {
                return Err(ReplayError::Divergence {
                    step,
                    event: recorded.event.to_string(),
                    recorded: Box::new(recorded.outcome.clone()),
                    actual: Box::new(actual),
                });
            }
            current = next;
        }
        Ok(current)
    }

    /// Runs `events` from `initial`, recording every outcome.
    pub fn record(
        &self,
        initial: SystemState,
        events: impl IntoIterator<Item = Event>,
    ) -> Result<(Trace, SystemState), KernelError> {
        let mut current = initial.clone();
        let mut steps = Vec::new();
        for event in events {
            let (next, outcome) = self.apply(&current, &event)?;
            steps.push(TraceStep { event, outcome });
            current = next;
        }
        Ok((Trace { initial, steps }, current))
    }
}

/// Whether `actor` may perform owner-control events on consumer `c`'s space:
/// the owner while no authorised representative exists, or any authorised
/// representative of that space.
pub fn actor_guard(s: &SystemState, actor: ActorRef, c: PersonId) -> bool {
    let Some(space) = s.space_of_consumer(c) else {
        return false;
    };
    match actor {
        ActorRef::Consumer(a) if a == c => !s.has_authorised_rep(space),
        ActorRef::Consumer(a) => s.authorised_rep.contains_pair(&a, &space),
        _ => false,
    }
}

/// Convenience: the set of people an actor guard admits for `c`.
pub fn controllers_of(s: &SystemState, c: PersonId) -> FiniteSet<PersonId> {
    let Some(space) = s.space_of_consumer(c) else {
        return FiniteSet::new();
    };
    if s.has_authorised_rep(space) {
        s.authorised_rep
            .iter()
            .filter(|(_, m)| *m == space)
            .map(|(a, _)| *a)
            .collect()
    } else {
        FiniteSet::singleton(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::{SpaceId, UniverseSize};

    fn machine() -> Machine {
        Machine::new(Universe::new(UniverseSize {
            people: 2,
            spaces: 2,
            records: 2,
            providers: 1,
            operators: 1,
        }))
    }

    fn p(i: u16) -> PersonId {
        PersonId::Person(i)
    }

    #[test]
    fn actor_guard_cases() {
        let m = machine();
        let s0 = m.initial_state();
        let (s, _) = m
            .apply(
                &s0,
                &Event::RegisterConsumer {
                    person: p(1),
                    space: SpaceId(1),
                },
            )
            .unwrap();
        let (s, _) = m
            .apply(
                &s,
                &Event::RegisterConsumer {
                    person: p(2),
                    space: SpaceId(2),
                },
            )
            .unwrap();
        assert!(actor_guard(&s, ActorRef::Consumer(p(1)), p(1)));
        assert!(!actor_guard(&s, ActorRef::Consumer(p(2)), p(1)));

        let (s, out) = m
            .apply(
                &s,
                &Event::AssignAuthorisedRep {
                    operator: PersonId::Operator(1),
                    rep: p(2),
                    consumer: p(1),
                },
            )
            .unwrap();
        assert!(out.is_applied());
        assert!(!actor_guard(&s, ActorRef::Consumer(p(1)), p(1)));
        assert!(actor_guard(&s, ActorRef::Consumer(p(2)), p(1)));
        assert_eq!(controllers_of(&s, p(1)), FiniteSet::from([p(2)]));
        assert!(!actor_guard(
            &s,
            ActorRef::Operator(PersonId::Operator(1)),
            p(1)
        ));
    }

    #[test]
    fn opt_out_of_non_consumer_is_rejected_by_grd1() {
        let m = machine();
        let s = m.initial_state();
        let (after, out) = m.apply(&s, &Event::OptOut { consumer: p(1) }).unwrap();
        match out {
            Outcome::Rejected(g) => {
                assert_eq!(g.event, "opt_out");
                assert_eq!(g.guard, "grd1");
            }
            Outcome::Applied => panic!("opt_out must be disabled"),
        }
        assert_eq!(after, s);
    }

    #[test]
    fn unknown_identifier_is_an_error_not_a_guard() {
        let m = machine();
        let s = m.initial_state();
        let err = m.apply(&s, &Event::OptOut { consumer: p(9) }).unwrap_err();
        assert!(matches!(err, KernelError::UnknownIdentifier { .. }));
    }

    #[test]
    fn replay_detects_divergence() {
        let m = machine();
        let register = Event::RegisterConsumer {
            person: p(1),
            space: SpaceId(1),
        };
        let (mut trace, last) = m.record(m.initial_state(), [register, register]).unwrap();
        assert_eq!(m.replay(&trace).unwrap(), last);
        trace.steps[1].outcome = Outcome::Applied;
        assert!(matches!(
            m.replay(&trace),
            Err(ReplayError::Divergence { step: 1, .. })
        ));
    }

    #[test]
    fn empty_trace_replays_to_initial() {
        let m = machine();
        let trace = Trace {
            initial: m.initial_state(),
            steps: vec![],
        };
        assert_eq!(m.replay(&trace).unwrap(), m.initial_state());
    }
}
