//! The flattened machine state: every variable of the abstract machine and
//! its three refinements in one value, plus queries over it.

mod access;
mod invariants;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use fnv::FnvHasher;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{PersonId, ProviderId, RecordId, SpaceId, Universe};
use crate::relations::{FiniteSet, Relation};

pub use access::can_view;
pub use invariants::{
    check_invariants, check_selected, recompute_derived, InvariantId, InvariantViolation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("system operator {0} is not in the people universe")]
    OperatorOutsideUniverse(PersonId),
    #[error("unknown record {0}")]
    UnknownRecord(RecordId),
}

/// How a record is marked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RecordCategory {
    General,
    Restricted,
    Hidden,
}

impl fmt::Display for RecordCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecordCategory::General => "general",
            RecordCategory::Restricted => "restricted",
            RecordCategory::Hidden => "hidden",
        })
    }
}

impl FromStr for RecordCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "general" => Ok(RecordCategory::General),
            "restricted" => Ok(RecordCategory::Restricted),
            "hidden" => Ok(RecordCategory::Hidden),
            other => Err(format!("unknown record category `{other}`")),
        }
    }
}

/// The per-space list a service provider sits in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProviderListKind {
    General,
    Restricted,
    Revoked,
}

/// The per-space list a nominated representative sits in. `FullAccess`
/// nominees are also members of the restricted list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NomineeListKind {
    General,
    Restricted,
    FullAccess,
}

/// One value per machine variable. Field order is the canonical JSON order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemState {
    pub consumers: FiniteSet<PersonId>,
    pub system_operators: FiniteSet<PersonId>,
    pub mhr_db: FiniteSet<SpaceId>,
    pub my_hr: Relation<PersonId, SpaceId>,
    pub records: FiniteSet<RecordId>,
    pub records_mhr: Relation<RecordId, SpaceId>,
    pub consumer_own_records: Relation<RecordId, PersonId>,
    pub general_records: FiniteSet<RecordId>,
    pub restricted_records: FiniteSet<RecordId>,
    pub hidden_records: FiniteSet<RecordId>,

    pub service_providers: FiniteSet<ProviderId>,
    pub consumer_sp: Relation<PersonId, ProviderId>,
    pub sp_mhr_access: Relation<ProviderId, SpaceId>,
    pub general_sp_list: Relation<ProviderId, SpaceId>,
    pub restricted_sp_list: Relation<ProviderId, SpaceId>,
    pub revoked_sp_list: Relation<ProviderId, SpaceId>,
    pub general_sp_access: Relation<ProviderId, RecordId>,
    pub restricted_sp_access: Relation<ProviderId, RecordId>,

    pub general_nominated: Relation<PersonId, SpaceId>,
    pub restricted_nominated: Relation<PersonId, SpaceId>,
    pub full_access_nominated: Relation<PersonId, SpaceId>,
    pub general_nominated_access: Relation<PersonId, RecordId>,
    pub restricted_nominated_access: Relation<PersonId, RecordId>,

    pub authorised_rep: Relation<PersonId, SpaceId>,
}

/// The empty machine with the given system operators.
pub fn initial_state(
    universe: &Universe,
    operators: &FiniteSet<PersonId>,
) -> Result<SystemState, StateError> {
    if let Some(op) = operators.iter().find(|op| !universe.has_person(**op)) {
        return Err(StateError::OperatorOutsideUniverse(*op));
    }
    Ok(SystemState {
        system_operators: operators.clone(),
        ..SystemState::default()
    })
}

/// 64-bit digest of the state. Sets hash in identifier order, so equal
/// states always produce equal digests.
pub fn hash_state(state: &SystemState) -> u64 {
    let mut hasher = FnvHasher::default();
    state.hash(&mut hasher);
    hasher.finish()
}

impl SystemState {
    /// `MyHR(c)`
    pub fn space_of_consumer(&self, consumer: PersonId) -> Option<SpaceId> {
        self.my_hr.apply(&consumer)
    }

    /// `MyHR⁻¹(m)`
    pub fn owner_of_space(&self, space: SpaceId) -> Option<PersonId> {
        self.my_hr
            .iter()
            .find(|(_, m)| *m == space)
            .map(|(c, _)| *c)
    }

    /// `records_mhr(r)`
    pub fn space_of_record(&self, record: RecordId) -> Option<SpaceId> {
        self.records_mhr.apply(&record)
    }

    /// `consumer_own_records(r)`
    pub fn owner_of_record(&self, record: RecordId) -> Option<PersonId> {
        self.consumer_own_records.apply(&record)
    }

    pub fn category_of(&self, record: RecordId) -> Option<RecordCategory> {
        if self.general_records.contains(&record) {
            Some(RecordCategory::General)
        } else if self.restricted_records.contains(&record) {
            Some(RecordCategory::Restricted)
        } else if self.hidden_records.contains(&record) {
            Some(RecordCategory::Hidden)
        } else {
            None
        }
    }

    /// `records_mhr⁻¹[{m}]`
    pub fn records_in_space(&self, space: SpaceId) -> FiniteSet<RecordId> {
        self.records_mhr
            .iter()
            .filter(|(_, m)| *m == space)
            .map(|(r, _)| *r)
            .collect()
    }

    pub fn provider_list_of(
        &self,
        provider: ProviderId,
        space: SpaceId,
    ) -> Option<ProviderListKind> {
        if self.general_sp_list.contains_pair(&provider, &space) {
            Some(ProviderListKind::General)
        } else if self.restricted_sp_list.contains_pair(&provider, &space) {
            Some(ProviderListKind::Restricted)
        } else if self.revoked_sp_list.contains_pair(&provider, &space) {
            Some(ProviderListKind::Revoked)
        } else {
            None
        }
    }

    /// The most specific nominee list `nominee` is in for `space`.
    pub fn nominee_list_of(&self, nominee: PersonId, space: SpaceId) -> Option<NomineeListKind> {
        if self.full_access_nominated.contains_pair(&nominee, &space) {
            Some(NomineeListKind::FullAccess)
        } else if self.restricted_nominated.contains_pair(&nominee, &space) {
            Some(NomineeListKind::Restricted)
        } else if self.general_nominated.contains_pair(&nominee, &space) {
            Some(NomineeListKind::General)
        } else {
            None
        }
    }

    pub fn has_authorised_rep(&self, space: SpaceId) -> bool {
        self.authorised_rep.iter().any(|(_, m)| *m == space)
    }

    /// Canonical JSON: one key per variable, sets as arrays in identifier
    /// order, pairs as two-element arrays.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<SystemState, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Injective byte encoding used by the checker to confirm equality of
    /// states with colliding digests without keeping full states around.
    pub fn encode_compact(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(128);
        self.consumers.encode(&mut out);
        self.system_operators.encode(&mut out);
        self.mhr_db.encode(&mut out);
        self.my_hr.encode(&mut out);
        self.records.encode(&mut out);
        self.records_mhr.encode(&mut out);
        self.consumer_own_records.encode(&mut out);
        self.general_records.encode(&mut out);
        self.restricted_records.encode(&mut out);
        self.hidden_records.encode(&mut out);
        self.service_providers.encode(&mut out);
        self.consumer_sp.encode(&mut out);
        self.sp_mhr_access.encode(&mut out);
        self.general_sp_list.encode(&mut out);
        self.restricted_sp_list.encode(&mut out);
        self.revoked_sp_list.encode(&mut out);
        self.general_sp_access.encode(&mut out);
        self.restricted_sp_access.encode(&mut out);
        self.general_nominated.encode(&mut out);
        self.restricted_nominated.encode(&mut out);
        self.full_access_nominated.encode(&mut out);
        self.general_nominated_access.encode(&mut out);
        self.restricted_nominated_access.encode(&mut out);
        self.authorised_rep.encode(&mut out);
        out
    }
}

trait Encode {
    fn encode(&self, out: &mut Vec<u8>);
}

impl Encode for PersonId {
    fn encode(&self, out: &mut Vec<u8>) {
        let raw = match *self {
            PersonId::Person(i) => i,
            PersonId::Operator(i) => 0x8000 | i,
        };
        out.extend_from_slice(&raw.to_le_bytes());
    }
}

macro_rules! encode_newtype {
    ($($ty:ty),*) => {$(
        impl Encode for $ty {
            fn encode(&self, out: &mut Vec<u8>) {
                out.extend_from_slice(&self.0.to_le_bytes());
            }
        }
    )*};
}

encode_newtype!(SpaceId, RecordId, ProviderId);

impl<A: Encode, B: Encode> Encode for (A, B) {
    fn encode(&self, out: &mut Vec<u8>) {
        self.0.encode(out);
        self.1.encode(out);
    }
}

impl<T: Ord + Encode> Encode for FiniteSet<T> {
    fn encode(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.len() as u32).to_le_bytes());
        for item in self.iter() {
            item.encode(out);
        }
    }
}
