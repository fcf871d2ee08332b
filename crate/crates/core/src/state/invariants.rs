//! The machine invariants INV-1..INV-18 and the from-scratch recomputation
//! of the redundant access relations.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ids::{PersonId, ProviderId, RecordId, SpaceId};
use crate::relations::{is_partition, FiniteSet, Relation};

use super::SystemState;

/// Stable names for the machine invariants, in evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InvariantId {
    Inv1,
    Inv2,
    Inv3,
    Inv4,
    Inv5,
    Inv6,
    Inv7,
    Inv8,
    Inv9,
    Inv10,
    Inv11,
    Inv12,
    Inv13,
    Inv14,
    Inv15,
    Inv16,
    Inv17,
    Inv18,
}

impl InvariantId {
    pub const ALL: [InvariantId; 18] = [
        InvariantId::Inv1,
        InvariantId::Inv2,
        InvariantId::Inv3,
        InvariantId::Inv4,
        InvariantId::Inv5,
        InvariantId::Inv6,
        InvariantId::Inv7,
        InvariantId::Inv8,
        InvariantId::Inv9,
        InvariantId::Inv10,
        InvariantId::Inv11,
        InvariantId::Inv12,
        InvariantId::Inv13,
        InvariantId::Inv14,
        InvariantId::Inv15,
        InvariantId::Inv16,
        InvariantId::Inv17,
        InvariantId::Inv18,
    ];

    /// 1-based invariant number.
    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn description(self) -> &'static str {
        use InvariantId::*;
        match self {
            Inv1 => "MyHR ∈ consumer ⤖ my_health_record_DB",
            Inv2 => "system_operator ∩ consumer = ∅",
            Inv3 => "records_mhr ∈ records → my_health_record_DB",
            Inv4 => "consumer_own_records ∈ records → consumer",
            Inv5 => "partition(records, general_records, restricted_records, hidden_records)",
            Inv6 => "consumer_own_records⁻¹ ; records_mhr ⊆ MyHR",
            Inv7 => "sp_MyHR_access = consumer_sp⁻¹ ; MyHR",
            Inv8 => "partition(sp_MyHR_access, general_sp_list, restricted_sp_list, revoked_sp_list)",
            Inv9 => "general_sp_access = general_sp_list ; (general_records ◁ records_mhr)⁻¹",
            Inv10 => "restricted_sp_access = (restricted_sp_list ; ((general_records ∪ restricted_records) ◁ records_mhr)⁻¹) ∪ (general_sp_list ; (general_records ◁ records_mhr)⁻¹)",
            Inv11 => "general_sp_access ⊆ restricted_sp_access",
            Inv12 => "general_nominated ∩ restricted_nominated = ∅",
            Inv13 => "full_access_nominated ⊆ restricted_nominated",
            Inv14 => "(general_nominated ∪ restricted_nominated) ∩ MyHR = ∅",
            Inv15 => "general_nominated_access = general_nominated ; (general_records ◁ records_mhr)⁻¹",
            Inv16 => "restricted_nominated_access = (restricted_nominated ; ((general_records ∪ restricted_records) ◁ records_mhr)⁻¹) ∪ (general_nominated ; (general_records ◁ records_mhr)⁻¹)",
            Inv17 => "general_nominated_access ⊆ restricted_nominated_access",
            Inv18 => "authorised_rep ∩ MyHR = ∅",
        }
    }
}

impl fmt::Display for InvariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "INV-{}", self.number())
    }
}

impl FromStr for InvariantId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let digits = s
            .strip_prefix("INV-")
            .or_else(|| s.strip_prefix("inv-"))
            .unwrap_or(s);
        digits
            .parse::<usize>()
            .ok()
            .and_then(|n| n.checked_sub(1))
            .and_then(|i| InvariantId::ALL.get(i).copied())
            .ok_or_else(|| format!("unknown invariant `{s}`"))
    }
}

impl Serialize for InvariantId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InvariantId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InvariantViolation {
    pub id: InvariantId,
    pub witness: String,
}

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated: {}", self.id, self.witness)
    }
}

/// Token rendering for witnesses: `r1`, `sp1↦m1`.
trait Token {
    fn token(&self) -> String;
}

macro_rules! token_via_display {
    ($($ty:ty),*) => {$(
        impl Token for $ty {
            fn token(&self) -> String {
                self.to_string()
            }
        }
    )*};
}

token_via_display!(PersonId, SpaceId, RecordId, ProviderId);

impl<A: Token, B: Token> Token for (A, B) {
    fn token(&self) -> String {
        format!("{}↦{}", self.0.token(), self.1.token())
    }
}

fn list<'a, T: Token + Ord + 'a>(items: impl IntoIterator<Item = &'a T>) -> String {
    let tokens: Vec<_> = items.into_iter().map(Token::token).collect();
    format!("{{{}}}", tokens.join(", "))
}

/// Describes how `actual` differs from `expected`, or `None` when equal.
fn relation_diff<A, B>(actual: &Relation<A, B>, expected: &Relation<A, B>) -> Option<String>
where
    A: Ord + Clone + Token,
    B: Ord + Clone + Token,
{
    if actual == expected {
        return None;
    }
    let extra = actual.difference(expected);
    let missing = expected.difference(actual);
    let mut out = String::new();
    if !extra.is_empty() {
        let _ = write!(out, "unexpected {}", list(extra.iter()));
    }
    if !missing.is_empty() {
        if !out.is_empty() {
            out.push_str("; ");
        }
        let _ = write!(out, "missing {}", list(missing.iter()));
    }
    Some(out)
}

fn subset_witness<A, B>(small: &Relation<A, B>, big: &Relation<A, B>) -> Option<String>
where
    A: Ord + Clone + Token,
    B: Ord + Clone + Token,
{
    let outside = small.difference(big);
    (!outside.is_empty()).then(|| format!("not contained: {}", list(outside.iter())))
}

fn function_witness<A, B>(rel: &Relation<A, B>, domain: &FiniteSet<A>, what: &str) -> Option<String>
where
    A: Ord + Clone + Token,
    B: Ord + Clone + Token,
{
    if rel.is_total_function(domain) {
        return None;
    }
    let mut parts = Vec::new();
    let dom = rel.dom();
    let unmapped = domain.difference(&dom);
    if !unmapped.is_empty() {
        parts.push(format!("unmapped {what} {}", list(unmapped.iter())));
    }
    let stray = dom.difference(domain);
    if !stray.is_empty() {
        parts.push(format!("outside domain {}", list(stray.iter())));
    }
    let multi: Vec<_> = dom
        .iter()
        .filter(|a| rel.image_of(a).len() > 1)
        .map(|a| format!("{}↦{}", a.token(), list(rel.image_of(a).iter())))
        .collect();
    if !multi.is_empty() {
        parts.push(format!("not functional at {}", multi.join(", ")));
    }
    Some(parts.join("; "))
}

/// `rel ∈ domain → codomain`
fn total_function_into<A, B>(
    rel: &Relation<A, B>,
    domain: &FiniteSet<A>,
    codomain: &FiniteSet<B>,
) -> Option<String>
where
    A: Ord + Clone + Token,
    B: Ord + Clone + Token,
{
    let stray = rel.ran().difference(codomain);
    let range = (!stray.is_empty())
        .then(|| format!("maps into {} outside the codomain", list(stray.iter())));
    match (function_witness(rel, domain, "records"), range) {
        (None, None) => None,
        (Some(a), None) | (None, Some(a)) => Some(a),
        (Some(a), Some(b)) => Some(format!("{a}; {b}")),
    }
}

fn partition_witness<T: Ord + Clone + Token>(
    whole: &FiniteSet<T>,
    parts: &[(&str, &FiniteSet<T>)],
) -> Option<String> {
    let blocks: Vec<_> = parts.iter().map(|(_, p)| *p).collect();
    if is_partition(whole, &blocks) {
        return None;
    }
    let mut out = Vec::new();
    for (i, (ni, pi)) in parts.iter().enumerate() {
        for (nj, pj) in &parts[i + 1..] {
            let both = pi.intersection(pj);
            if !both.is_empty() {
                out.push(format!("{} in both {ni} and {nj}", list(both.iter())));
            }
        }
    }
    let union = blocks
        .iter()
        .fold(FiniteSet::new(), |acc: FiniteSet<T>, p| acc.union(p));
    let uncovered = whole.difference(&union);
    if !uncovered.is_empty() {
        out.push(format!("{} in no block", list(uncovered.iter())));
    }
    let stray = union.difference(whole);
    if !stray.is_empty() {
        out.push(format!(
            "{} outside the partitioned set",
            list(stray.iter())
        ));
    }
    Some(out.join("; "))
}

// Right-hand sides of the definitional invariants. These are the relational
// definitions evaluated from scratch; the kernel never calls them.

fn visible_general(s: &SystemState) -> Relation<SpaceId, RecordId> {
    s.records_mhr.domain_restrict(&s.general_records).inverse()
}

fn visible_restricted(s: &SystemState) -> Relation<SpaceId, RecordId> {
    s.records_mhr
        .domain_restrict(&s.general_records.union(&s.restricted_records))
        .inverse()
}

pub(crate) fn expected_sp_mhr_access(s: &SystemState) -> Relation<ProviderId, SpaceId> {
    s.consumer_sp.inverse().compose(&s.my_hr)
}

pub(crate) fn expected_general_sp_access(s: &SystemState) -> Relation<ProviderId, RecordId> {
    s.general_sp_list.compose(&visible_general(s))
}

pub(crate) fn expected_restricted_sp_access(s: &SystemState) -> Relation<ProviderId, RecordId> {
    s.restricted_sp_list
        .compose(&visible_restricted(s))
        .union(&s.general_sp_list.compose(&visible_general(s)))
}

pub(crate) fn expected_general_nominated_access(s: &SystemState) -> Relation<PersonId, RecordId> {
    s.general_nominated.compose(&visible_general(s))
}

pub(crate) fn expected_restricted_nominated_access(
    s: &SystemState,
) -> Relation<PersonId, RecordId> {
    s.restricted_nominated
        .compose(&visible_restricted(s))
        .union(&s.general_nominated.compose(&visible_general(s)))
}

fn evaluate(s: &SystemState, id: InvariantId) -> Option<String> {
    use InvariantId::*;
    match id {
        Inv1 => {
            if s.my_hr.is_bijection(&s.consumers, &s.mhr_db) {
                None
            } else {
                let forward = function_witness(&s.my_hr, &s.consumers, "consumers");
                let backward = function_witness(&s.my_hr.inverse(), &s.mhr_db, "spaces");
                let parts: Vec<_> = forward
                    .into_iter()
                    .chain(backward.map(|b| format!("inverse: {b}")))
                    .collect();
                Some(parts.join("; "))
            }
        }
        Inv2 => {
            let both = s.system_operators.intersection(&s.consumers);
            (!both.is_empty()).then(|| format!("operators who are consumers {}", list(both.iter())))
        }
        Inv3 => total_function_into(&s.records_mhr, &s.records, &s.mhr_db),
        Inv4 => total_function_into(&s.consumer_own_records, &s.records, &s.consumers),
        Inv5 => partition_witness(
            &s.records,
            &[
                ("general_records", &s.general_records),
                ("restricted_records", &s.restricted_records),
                ("hidden_records", &s.hidden_records),
            ],
        ),
        // An owner with no records is absent from the composition, so only
        // containment holds in general.
        Inv6 => subset_witness(
            &s.consumer_own_records.inverse().compose(&s.records_mhr),
            &s.my_hr,
        ),
        Inv7 => relation_diff(&s.sp_mhr_access, &expected_sp_mhr_access(s)),
        Inv8 => partition_witness(
            &s.sp_mhr_access,
            &[
                ("general_sp_list", &s.general_sp_list),
                ("restricted_sp_list", &s.restricted_sp_list),
                ("revoked_sp_list", &s.revoked_sp_list),
            ],
        ),
        Inv9 => relation_diff(&s.general_sp_access, &expected_general_sp_access(s)),
        Inv10 => relation_diff(&s.restricted_sp_access, &expected_restricted_sp_access(s)),
        Inv11 => subset_witness(&s.general_sp_access, &s.restricted_sp_access),
        Inv12 => {
            let both = s.general_nominated.intersection(&s.restricted_nominated);
            (!both.is_empty()).then(|| format!("in both lists {}", list(both.iter())))
        }
        Inv13 => subset_witness(&s.full_access_nominated, &s.restricted_nominated),
        Inv14 => {
            let own = s
                .general_nominated
                .union(&s.restricted_nominated)
                .intersection(&s.my_hr);
            (!own.is_empty())
                .then(|| format!("owners nominated to their own space {}", list(own.iter())))
        }
        Inv15 => relation_diff(
            &s.general_nominated_access,
            &expected_general_nominated_access(s),
        ),
        Inv16 => relation_diff(
            &s.restricted_nominated_access,
            &expected_restricted_nominated_access(s),
        ),
        Inv17 => subset_witness(&s.general_nominated_access, &s.restricted_nominated_access),
        Inv18 => {
            let own = s.authorised_rep.intersection(&s.my_hr);
            (!own.is_empty()).then(|| {
                format!(
                    "owners authorised over their own space {}",
                    list(own.iter())
                )
            })
        }
    }
}

/// Evaluates every invariant in order and returns all that fail.
pub fn check_invariants(s: &SystemState) -> Vec<InvariantViolation> {
    check_selected(s, &InvariantId::ALL)
}

/// Evaluates the chosen invariants, in the order given.
pub fn check_selected(s: &SystemState, ids: &[InvariantId]) -> Vec<InvariantViolation> {
    ids.iter()
        .filter_map(|&id| evaluate(s, id).map(|witness| InvariantViolation { id, witness }))
        .collect()
}

/// Rebuilds the five redundant relations from their relational definitions.
pub fn recompute_derived(s: &SystemState) -> SystemState {
    SystemState {
        sp_mhr_access: expected_sp_mhr_access(s),
        general_sp_access: expected_general_sp_access(s),
        restricted_sp_access: expected_restricted_sp_access(s),
        general_nominated_access: expected_general_nominated_access(s),
        restricted_nominated_access: expected_restricted_nominated_access(s),
        ..s.clone()
    }
}
