//! The event catalog. A single table drives the `Event` enum, its textual
//! form (`name arg arg …`), argument parsing and candidate enumeration.

use std::fmt;

use crate::ids::{ActorRef, IdError, PersonId, ProviderId, RecordId, SpaceId, Universe};
use crate::state::RecordCategory;

/// The namespace an event parameter is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArgKind {
    Person,
    Space,
    Record,
    Provider,
    Actor,
    Category,
}

impl ArgKind {
    pub fn describe(self) -> &'static str {
        match self {
            ArgKind::Person => "person (p<n> or o<n>)",
            ArgKind::Space => "record space (m<n>)",
            ArgKind::Record => "record (r<n>)",
            ArgKind::Provider => "service provider (sp<n>)",
            ArgKind::Actor => "actor (p<n>, o<n> or sp<n>)",
            ArgKind::Category => "category (general or restricted)",
        }
    }
}

/// One event parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arg {
    Person(PersonId),
    Space(SpaceId),
    Record(RecordId),
    Provider(ProviderId),
    Actor(ActorRef),
    Category(RecordCategory),
}

impl Arg {
    pub fn parse(kind: ArgKind, token: &str) -> Result<Arg, IdError> {
        Ok(match kind {
            ArgKind::Person => Arg::Person(token.parse()?),
            ArgKind::Space => Arg::Space(token.parse()?),
            ArgKind::Record => Arg::Record(token.parse()?),
            ArgKind::Provider => Arg::Provider(token.parse()?),
            ArgKind::Actor => Arg::Actor(token.parse()?),
            ArgKind::Category => match token {
                "general" => Arg::Category(RecordCategory::General),
                "restricted" => Arg::Category(RecordCategory::Restricted),
                _ => {
                    return Err(IdError::WrongKind {
                        token: token.to_string(),
                        expected: "record category (general or restricted)",
                    })
                }
            },
        })
    }

    /// Whether the identifier exists in `universe`.
    pub fn in_universe(&self, universe: &Universe) -> bool {
        match *self {
            Arg::Person(p) => universe.has_person(p),
            Arg::Space(m) => universe.has_space(m),
            Arg::Record(r) => universe.has_record(r),
            Arg::Provider(sp) => universe.has_provider(sp),
            Arg::Actor(a) => universe.has_actor(a),
            Arg::Category(_) => true,
        }
    }

    /// Every value of `kind` in `universe`.
    fn all(kind: ArgKind, universe: &Universe) -> Vec<Arg> {
        match kind {
            ArgKind::Person => universe.people.iter().map(|&p| Arg::Person(p)).collect(),
            ArgKind::Space => universe
                .record_spaces
                .iter()
                .map(|&m| Arg::Space(m))
                .collect(),
            ArgKind::Record => universe.resources.iter().map(|&r| Arg::Record(r)).collect(),
            ArgKind::Provider => universe
                .providers
                .iter()
                .map(|&sp| Arg::Provider(sp))
                .collect(),
            ArgKind::Actor => universe
                .people
                .iter()
                .map(|&p| Arg::Actor(ActorRef::person(p)))
                .chain(
                    universe
                        .providers
                        .iter()
                        .map(|&sp| Arg::Actor(ActorRef::Provider(sp))),
                )
                .collect(),
            ArgKind::Category => vec![
                Arg::Category(RecordCategory::General),
                Arg::Category(RecordCategory::Restricted),
            ],
        }
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Person(p) => p.fmt(f),
            Arg::Space(m) => m.fmt(f),
            Arg::Record(r) => r.fmt(f),
            Arg::Provider(sp) => sp.fmt(f),
            Arg::Actor(a) => a.fmt(f),
            Arg::Category(c) => c.fmt(f),
        }
    }
}

macro_rules! arg_ty {
    (Person) => {
        PersonId
    };
    (Space) => {
        SpaceId
    };
    (Record) => {
        RecordId
    };
    (Provider) => {
        ProviderId
    };
    (Actor) => {
        ActorRef
    };
    (Category) => {
        RecordCategory
    };
}

macro_rules! events {
    ($( $(#[$doc:meta])* $variant:ident = $name:literal { $($field:ident : $kind:ident),* } ),* $(,)?) => {
        /// A submitted event with its parameters.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum Event {
            $( $(#[$doc])* $variant { $($field: arg_ty!($kind)),* } ),*
        }

        /// Every event name with its parameter kinds, in declaration order.
        pub const EVENT_SIGNATURES: &[(&str, &[ArgKind])] = &[
            $( ($name, &[$(ArgKind::$kind),*]) ),*
        ];

        impl Event {
            pub fn name(&self) -> &'static str {
                match self {
                    $( Event::$variant { .. } => $name ),*
                }
            }

            pub fn args(&self) -> Vec<Arg> {
                match *self {
                    $( Event::$variant { $($field),* } => vec![$(Arg::$kind($field)),*] ),*
                }
            }

            /// Builds an event from its name and already-typed arguments.
            /// Returns `None` on an unknown name, wrong arity or wrong kinds.
            pub fn from_args(name: &str, args: &[Arg]) -> Option<Event> {
                match name {
                    $( $name => {
                        #[allow(unused_mut)]
                        let mut rest = args.iter();
                        $( let $field = match rest.next()? {
                            Arg::$kind(value) => *value,
                            _ => return None,
                        }; )*
                        if rest.next().is_some() {
                            return None;
                        }
                        Some(Event::$variant { $($field),* })
                    } )*
                    _ => None,
                }
            }
        }
    };
}

events! {
    RegisterConsumer = "register_consumer" { person: Person, space: Space },
    OptOut = "opt_out" { consumer: Person },
    UploadRecord = "upload_record" { actor: Person, consumer: Person, record: Record, category: Category },
    DeleteRecord = "delete_record" { actor: Person, consumer: Person, record: Record },
    RestrictRecord = "restrict_record" { actor: Person, consumer: Person, record: Record },
    GeneralRecord = "general_record" { actor: Person, consumer: Person, record: Record },
    HideRecord = "hide_record" { actor: Person, consumer: Person, record: Record },
    UnhideRecord = "unhide_record" { operator: Person, record: Record },
    ViewRecord = "view_record" { actor: Actor, record: Record },
    RegisterServiceProvider = "register_service_provider" { provider: Provider },
    AssignProvider = "assign_provider" { actor: Person, consumer: Person, provider: Provider },
    UnassignProvider = "unassign_provider" { actor: Person, consumer: Person, provider: Provider },
    GrantGeneralSp = "grant_general_sp" { actor: Person, consumer: Person, provider: Provider },
    GrantRestrictedSp = "grant_restricted_sp" { actor: Person, consumer: Person, provider: Provider },
    RevokeAccessSp = "revoke_access_sp" { actor: Person, consumer: Person, provider: Provider },
    UploadGeneralRecordSp = "upload_general_record_SP" { provider: Provider, consumer: Person, record: Record },
    UploadRestrictedRecordSp = "upload_restricted_record_SP" { provider: Provider, consumer: Person, record: Record },
    AddNominatedGeneral = "add_nominated_general" { actor: Person, consumer: Person, nominee: Person },
    AddNominatedRestricted = "add_nominated_restricted" { actor: Person, consumer: Person, nominee: Person },
    GrantFullAccessToNominated = "grant_full_access_to_nominated" { actor: Person, consumer: Person, nominee: Person },
    RemoveNominated = "remove_nominated" { actor: Person, consumer: Person, nominee: Person },
    UploadGeneralRecordNominated = "upload_general_record_nominated" { nominee: Person, consumer: Person, record: Record },
    UploadRestrictedRecordNominated = "upload_restricted_record_nominated" { nominee: Person, consumer: Person, record: Record },
    AssignAuthorisedRep = "assign_authorised_rep" { operator: Person, rep: Person, consumer: Person },
    RemoveAuthorisedRep = "remove_authorised_rep" { operator: Person, rep: Person, consumer: Person },
}

impl Event {
    pub fn signature(name: &str) -> Option<&'static [ArgKind]> {
        EVENT_SIGNATURES
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, kinds)| *kinds)
    }

    /// Canonical ordering key: event name, then parameters in identifier order.
    pub fn sort_key(&self) -> (&'static str, Vec<Arg>) {
        (self.name(), self.args())
    }

    pub fn in_universe(&self, universe: &Universe) -> bool {
        self.args().iter().all(|a| a.in_universe(universe))
    }

    /// Whether this event is one of the owner-control events that carry the
    /// authorised-representative actor guard.
    pub fn is_owner_control(&self) -> bool {
        matches!(
            self,
            Event::UploadRecord { .. }
                | Event::DeleteRecord { .. }
                | Event::RestrictRecord { .. }
                | Event::GeneralRecord { .. }
                | Event::HideRecord { .. }
                | Event::AssignProvider { .. }
                | Event::UnassignProvider { .. }
                | Event::GrantGeneralSp { .. }
                | Event::GrantRestrictedSp { .. }
                | Event::RevokeAccessSp { .. }
                | Event::AddNominatedGeneral { .. }
                | Event::AddNominatedRestricted { .. }
                | Event::GrantFullAccessToNominated { .. }
                | Event::RemoveNominated { .. }
        )
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        for arg in self.args() {
            write!(f, " {arg}")?;
        }
        Ok(())
    }
}

/// Every instantiation of every event over `universe`, canonically sorted.
pub fn all_instantiations(universe: &Universe) -> Vec<Event> {
    let mut out = Vec::new();
    for (name, kinds) in EVENT_SIGNATURES {
        let mut partial: Vec<Vec<Arg>> = vec![Vec::new()];
        for kind in kinds.iter() {
            let values = Arg::all(*kind, universe);
            partial = partial
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |v| {
                        let mut next = prefix.clone();
                        next.push(*v);
                        next
                    })
                })
                .collect();
        }
        out.extend(
            partial
                .iter()
                .map(|args| Event::from_args(name, args).expect("signature-built arguments")),
        );
    }
    out.sort_by_cached_key(Event::sort_key);
    out
}
