//! Executable model of the My Health Record access-control system.
//!
//! * [`relations`]: finite sets and relations with the usual set-theoretic
//!   operators.
//! * [`state`]: the machine variables, the invariant engine and the access
//!   query.
//! * [`kernel`]: guarded events and their effect on the state.
//! * [`checker`]: bounded breadth-first exploration and seeded fuzzing.
//! * [`scenario`]: the text format for scenarios and counterexample traces.
//! * [`cli`]: the command implementations behind the `mhr-acl` binary.

pub mod checker;
pub mod cli;
pub mod ids;
pub mod kernel;
pub mod relations;
pub mod scenario;
pub mod state;

pub use ids::{ActorRef, PersonId, ProviderId, RecordId, SpaceId, Universe, UniverseSize};
pub use kernel::{Event, Machine, Outcome};
pub use relations::{FiniteSet, Relation};
pub use state::SystemState;
