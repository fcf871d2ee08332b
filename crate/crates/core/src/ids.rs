//! Identifier namespaces and the finite universe a machine runs over.
//!
//! Identifiers are printed as a prefix plus a 1-based index: people `p1`,
//! system operators `o1`, record spaces `m1`, records `r1` and service
//! providers `sp1`. Operators are people too (they share [`PersonId`]) but
//! get their own prefix so scenario files can name them directly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::relations::FiniteSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdError {
    #[error("malformed identifier `{0}`")]
    Malformed(String),
    #[error("identifier `{token}` is not a {expected}")]
    WrongKind {
        token: String,
        expected: &'static str,
    },
}

/// Splits `sp12` into (`sp`, 12). Indices are 1-based; `0` is rejected.
fn split_token(token: &str) -> Result<(&str, u16), IdError> {
    let digits = token
        .find(|c: char| c.is_ascii_digit())
        .ok_or_else(|| IdError::Malformed(token.to_string()))?;
    let (prefix, number) = token.split_at(digits);
    if prefix.is_empty() || !number.bytes().all(|b| b.is_ascii_digit()) || number.starts_with('0') {
        return Err(IdError::Malformed(token.to_string()));
    }
    let index = number
        .parse::<u16>()
        .map_err(|_| IdError::Malformed(token.to_string()))?;
    Ok((prefix, index))
}

macro_rules! serde_via_display {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let token = String::deserialize(deserializer)?;
                token.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

macro_rules! simple_id {
    ($(#[$meta:meta])* $name:ident, $prefix:literal, $kind:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub u16);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }

        impl FromStr for $name {
            type Err = IdError;

            fn from_str(token: &str) -> Result<Self, IdError> {
                match split_token(token)? {
                    ($prefix, index) => Ok($name(index)),
                    _ => Err(IdError::WrongKind {
                        token: token.to_string(),
                        expected: $kind,
                    }),
                }
            }
        }

        serde_via_display!($name);
    };
}

simple_id!(
    /// A `MY_HEALTH_RECORD` space.
    SpaceId,
    "m",
    "record space"
);
simple_id!(
    /// An element of `RESOURCES`.
    RecordId,
    "r",
    "record"
);
simple_id!(ProviderId, "sp", "service provider");

/// An element of `PEOPLE`. Ordinary people sort before operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PersonId {
    Person(u16),
    Operator(u16),
}

impl fmt::Display for PersonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PersonId::Person(i) => write!(f, "p{i}"),
            PersonId::Operator(i) => write!(f, "o{i}"),
        }
    }
}

impl FromStr for PersonId {
    type Err = IdError;

    fn from_str(token: &str) -> Result<Self, IdError> {
        match split_token(token)? {
            ("p", i) => Ok(PersonId::Person(i)),
            ("o", i) => Ok(PersonId::Operator(i)),
            _ => Err(IdError::WrongKind {
                token: token.to_string(),
                expected: "person",
            }),
        }
    }
}

serde_via_display!(PersonId);

/// Who is attempting an access or control action. Nominee and authorised
/// representative roles are looked up in the state, not carried here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActorRef {
    Consumer(PersonId),
    Provider(ProviderId),
    Operator(PersonId),
}

impl ActorRef {
    /// The actor reference a person acts under: operators as `Operator`,
    /// everyone else as `Consumer`.
    pub fn person(id: PersonId) -> Self {
        match id {
            PersonId::Person(_) => ActorRef::Consumer(id),
            PersonId::Operator(_) => ActorRef::Operator(id),
        }
    }
}

impl fmt::Display for ActorRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActorRef::Consumer(p) | ActorRef::Operator(p) => p.fmt(f),
            ActorRef::Provider(sp) => sp.fmt(f),
        }
    }
}

impl FromStr for ActorRef {
    type Err = IdError;

    fn from_str(token: &str) -> Result<Self, IdError> {
        match split_token(token)? {
            ("sp", i) => Ok(ActorRef::Provider(ProviderId(i))),
            ("p", _) | ("o", _) => Ok(ActorRef::person(token.parse()?)),
            _ => Err(IdError::WrongKind {
                token: token.to_string(),
                expected: "person, operator or service provider",
            }),
        }
    }
}

/// Sizes of the carrier sets. `people` counts ordinary people only; the
/// `operators` are additional members of `PEOPLE`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UniverseSize {
    pub people: u16,
    pub spaces: u16,
    pub records: u16,
    pub providers: u16,
    pub operators: u16,
}

impl fmt::Display for UniverseSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "universe people={} spaces={} records={} providers={} operators={}",
            self.people, self.spaces, self.records, self.providers, self.operators
        )
    }
}

/// The carrier sets instantiated as explicit finite sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    pub size: UniverseSize,
    pub people: FiniteSet<PersonId>,
    pub record_spaces: FiniteSet<SpaceId>,
    pub resources: FiniteSet<RecordId>,
    pub providers: FiniteSet<ProviderId>,
}

impl Universe {
    pub fn new(size: UniverseSize) -> Self {
        let people = (1..=size.people)
            .map(PersonId::Person)
            .chain((1..=size.operators).map(PersonId::Operator))
            .collect();
        Universe {
            size,
            people,
            record_spaces: (1..=size.spaces).map(SpaceId).collect(),
            resources: (1..=size.records).map(RecordId).collect(),
            providers: (1..=size.providers).map(ProviderId).collect(),
        }
    }

    /// The operator members of `PEOPLE`, `o1..oK`.
    pub fn operators(&self) -> FiniteSet<PersonId> {
        (1..=self.size.operators).map(PersonId::Operator).collect()
    }

    pub fn has_person(&self, id: PersonId) -> bool {
        self.people.contains(&id)
    }

    pub fn has_space(&self, id: SpaceId) -> bool {
        self.record_spaces.contains(&id)
    }

    pub fn has_record(&self, id: RecordId) -> bool {
        self.resources.contains(&id)
    }

    pub fn has_provider(&self, id: ProviderId) -> bool {
        self.providers.contains(&id)
    }

    pub fn has_actor(&self, actor: ActorRef) -> bool {
        match actor {
            ActorRef::Consumer(p) | ActorRef::Operator(p) => self.has_person(p),
            ActorRef::Provider(sp) => self.has_provider(sp),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_round_trip() {
        assert_eq!("p3".parse::<PersonId>(), Ok(PersonId::Person(3)));
        assert_eq!("o1".parse::<PersonId>(), Ok(PersonId::Operator(1)));
        assert_eq!("sp2".parse::<ProviderId>(), Ok(ProviderId(2)));
        assert_eq!("m10".parse::<SpaceId>().unwrap().to_string(), "m10");
        assert_eq!(
            "sp1".parse::<ActorRef>(),
            Ok(ActorRef::Provider(ProviderId(1)))
        );
        assert_eq!(
            "o2".parse::<ActorRef>(),
            Ok(ActorRef::Operator(PersonId::Operator(2)))
        );
    }

    #[test]
    fn malformed_tokens() {
        for bad in ["", "p", "12", "p0", "p01", "p1x", "r-1", "p99999"] {
            assert!(bad.parse::<PersonId>().is_err(), "{bad}");
        }
        assert!(matches!(
            "m1".parse::<RecordId>(),
            Err(IdError::WrongKind { .. })
        ));
    }

    #[test]
    fn ordering_is_numeric() {
        assert!(PersonId::Person(2) < PersonId::Person(10));
        assert!(PersonId::Person(10) < PersonId::Operator(1));
    }

    #[test]
    fn universe_layout() {
        let u = Universe::new(UniverseSize {
            people: 2,
            spaces: 1,
            records: 3,
            providers: 0,
            operators: 1,
        });
        assert_eq!(u.people.len(), 3);
        assert!(u.has_person(PersonId::Operator(1)));
        assert!(!u.has_person(PersonId::Person(3)));
        assert!(u.operators().is_subset(&u.people));
        assert!(u.providers.is_empty());
    }
}
