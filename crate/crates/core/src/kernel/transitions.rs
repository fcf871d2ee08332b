//! Guards and actions for every event.
//!
//! Each handler first evaluates its guards against the pre-state `s`, in the
//! order they are listed, and only then clones `s` into the successor. All
//! right-hand sides read `s`, never the partially updated successor.

use crate::ids::{ActorRef, PersonId, ProviderId, RecordId, SpaceId};
use crate::relations::FiniteSet;
use crate::state::{can_view, RecordCategory, SystemState};

use super::{actor_guard, Event, GuardError, Machine, Mutant};

type Fired = Result<SystemState, GuardError>;

macro_rules! guard {
    ($event:expr, $cond:expr, $label:literal, $detail:literal) => {
        if !$cond {
            return Err(GuardError {
                event: $event,
                guard: $label,
                detail: $detail,
            });
        }
    };
}

/// The refinement-3 guard carried by every owner-control event.
macro_rules! control_guard {
    ($event:expr, $s:expr, $actor:expr, $consumer:expr) => {
        guard!(
            $event,
            actor_guard($s, ActorRef::person($actor), $consumer),
            "grd1_r3",
            "actor owns MyHR(c) and MyHR(c) ∉ ran(authorised_rep), or actor ↦ MyHR(c) ∈ authorised_rep"
        )
    };
}

pub(super) fn fire(machine: &Machine, s: &SystemState, event: &Event) -> Fired {
    let mutant = machine.mutant();
    let name = event.name();
    match *event {
        Event::RegisterConsumer { person, space } => {
            guard!(name, !s.consumers.contains(&person), "grd1", "p ∉ consumer");
            guard!(
                name,
                !s.system_operators.contains(&person),
                "grd2",
                "p ∉ system_operator"
            );
            guard!(
                name,
                !s.mhr_db.contains(&space),
                "grd3",
                "m ∉ my_health_record_DB"
            );
            let mut next = s.clone();
            next.consumers.insert(person);
            next.mhr_db.insert(space);
            next.my_hr.insert((person, space));
            Ok(next)
        }

        Event::OptOut { consumer } => {
            guard!(
                name,
                s.consumers.contains(&consumer),
                "grd1",
                "c ∈ consumer"
            );
            let space = space_of(s, consumer);
            let mut next = s.clone();
            next.consumers.remove(&consumer);
            next.mhr_db.remove(&space);
            next.my_hr.remove(&(consumer, space));
            if mutant != Some(Mutant::OptOutNoCascade) {
                cascade_opt_out(s, &mut next, consumer, space);
            }
            Ok(next)
        }

        Event::UploadRecord {
            actor,
            consumer,
            record,
            category,
        } => {
            guard!(
                name,
                s.consumers.contains(&consumer),
                "grd1",
                "c ∈ consumer"
            );
            guard!(
                name,
                !s.records.contains(&record),
                "grd2",
                "r ∈ RESOURCES \\ records"
            );
            guard!(
                name,
                category != RecordCategory::Hidden,
                "grd3",
                "category ∈ {general, restricted}"
            );
            control_guard!(name, s, actor, consumer);
            let mut next = s.clone();
            let space = space_of(s, consumer);
            add_record(&mut next, record, space, consumer, category);
            if mutant != Some(Mutant::UploadSkipsAccess) {
                grant_record_access(s, &mut next, record, space, category);
            }
            Ok(next)
        }

        Event::DeleteRecord {
            actor,
            consumer,
            record,
        } => {
            guard!(
                name,
                s.consumer_own_records.contains_pair(&record, &consumer),
                "grd1",
                "r ↦ c ∈ consumer_own_records"
            );
            control_guard!(name, s, actor, consumer);
            let mut next = s.clone();
            next.records.remove(&record);
            next.general_records.remove(&record);
            next.restricted_records.remove(&record);
            next.hidden_records.remove(&record);
            next.records_mhr.retain(|(r, _)| *r != record);
            next.consumer_own_records.retain(|(r, _)| *r != record);
            drop_record_access(&mut next, record);
            Ok(next)
        }

        Event::RestrictRecord {
            actor,
            consumer,
            record,
        } => {
            guard!(
                name,
                s.consumer_own_records.contains_pair(&record, &consumer),
                "grd1",
                "r ↦ c ∈ consumer_own_records"
            );
            if mutant != Some(Mutant::DropRestrictGrd2) {
                guard!(
                    name,
                    s.general_records.contains(&record),
                    "grd2",
                    "r ∈ general_records"
                );
            }
            control_guard!(name, s, actor, consumer);
            let mut next = s.clone();
            next.restricted_records.insert(record);
            next.general_records.remove(&record);
            recategorise_access(s, &mut next, record, RecordCategory::Restricted);
            Ok(next)
        }

        Event::GeneralRecord {
            actor,
            consumer,
            record,
        } => {
            guard!(
                name,
                s.consumer_own_records.contains_pair(&record, &consumer),
                "grd1",
                "r ↦ c ∈ consumer_own_records"
            );
            guard!(
                name,
                s.restricted_records.contains(&record),
                "grd2",
                "r ∈ restricted_records"
            );
            control_guard!(name, s, actor, consumer);
            let mut next = s.clone();
            next.general_records.insert(record);
            next.restricted_records.remove(&record);
            recategorise_access(s, &mut next, record, RecordCategory::General);
            Ok(next)
        }

        Event::HideRecord {
            actor,
            consumer,
            record,
        } => {
            guard!(
                name,
                s.consumer_own_records.contains_pair(&record, &consumer),
                "grd1",
                "r ↦ c ∈ consumer_own_records"
            );
            guard!(
                name,
                !s.hidden_records.contains(&record),
                "grd2",
                "r ∉ hidden_records"
            );
            control_guard!(name, s, actor, consumer);
            let mut next = s.clone();
            next.hidden_records.insert(record);
            next.general_records.remove(&record);
            next.restricted_records.remove(&record);
            if mutant != Some(Mutant::HideKeepsAccess) {
                drop_record_access(&mut next, record);
            }
            Ok(next)
        }

        Event::UnhideRecord { operator, record } => {
            guard!(
                name,
                s.system_operators.contains(&operator),
                "grd1",
                "op ∈ system_operator"
            );
            guard!(
                name,
                s.hidden_records.contains(&record),
                "grd2",
                "r ∈ hidden_records"
            );
            let mut next = s.clone();
            next.hidden_records.remove(&record);
            next.general_records.insert(record);
            let space = s.space_of_record(record).expect("records_mhr is total");
            grant_record_access(s, &mut next, record, space, RecordCategory::General);
            Ok(next)
        }

        Event::ViewRecord { actor, record } => {
            guard!(name, s.records.contains(&record), "grd1", "r ∈ records");
            let visible = can_view(s, actor, record).unwrap_or(false);
            guard!(name, visible, "grd2", "actor has read access to r");
            Ok(s.clone())
        }

        Event::RegisterServiceProvider { provider } => {
            guard!(
                name,
                !s.service_providers.contains(&provider),
                "grd1",
                "sp ∉ service_providers"
            );
            let mut next = s.clone();
            next.service_providers.insert(provider);
            Ok(next)
        }

        Event::AssignProvider {
            actor,
            consumer,
            provider,
        } => {
            guard!(
                name,
                s.consumers.contains(&consumer),
                "grd1",
                "c ∈ consumer"
            );
            guard!(
                name,
                s.service_providers.contains(&provider),
                "grd2",
                "sp ∈ service_providers"
            );
            guard!(
                name,
                !s.consumer_sp.contains_pair(&consumer, &provider),
                "grd3",
                "c ↦ sp ∉ consumer_sp"
            );
            control_guard!(name, s, actor, consumer);
            let space = space_of(s, consumer);
            let mut next = s.clone();
            next.consumer_sp.insert((consumer, provider));
            next.sp_mhr_access.insert((provider, space));
            if mutant != Some(Mutant::AssignSkipsList) {
                next.general_sp_list.insert((provider, space));
            }
            reset_provider_access(&mut next, provider, space);
            Ok(next)
        }

        Event::UnassignProvider {
            actor,
            consumer,
            provider,
        } => {
            guard!(
                name,
                s.consumers.contains(&consumer),
                "grd1",
                "c ∈ consumer"
            );
            guard!(
                name,
                s.consumer_sp.contains_pair(&consumer, &provider),
                "grd2",
                "c ↦ sp ∈ consumer_sp"
            );
            control_guard!(name, s, actor, consumer);
            let space = space_of(s, consumer);
            let link = (provider, space);
            let mut next = s.clone();
            next.consumer_sp.remove(&(consumer, provider));
            next.sp_mhr_access.remove(&link);
            next.general_sp_list.remove(&link);
            next.restricted_sp_list.remove(&link);
            next.revoked_sp_list.remove(&link);
            reset_provider_access(&mut next, provider, space);
            Ok(next)
        }

        Event::GrantGeneralSp {
            actor,
            consumer,
            provider,
        } => {
            guard!(
                name,
                s.consumers.contains(&consumer),
                "grd1",
                "c ∈ consumer"
            );
            guard!(
                name,
                s.consumer_sp.contains_pair(&consumer, &provider),
                "grd2",
                "c ↦ sp ∈ consumer_sp"
            );
            let space = space_of(s, consumer);
            guard!(
                name,
                !s.general_sp_list.contains_pair(&provider, &space),
                "grd3",
                "sp ↦ MyHR(c) ∉ general_sp_list"
            );
            control_guard!(name, s, actor, consumer);
            let link = (provider, space);
            let mut next = s.clone();
            next.general_sp_list.insert(link);
            next.restricted_sp_list.remove(&link);
            next.revoked_sp_list.remove(&link);
            reset_provider_access(&mut next, provider, space);
            Ok(next)
        }

        Event::GrantRestrictedSp {
            actor,
            consumer,
            provider,
        } => {
            guard!(
                name,
                s.consumers.contains(&consumer),
                "grd1",
                "c ∈ consumer"
            );
            guard!(
                name,
                s.consumer_sp.contains_pair(&consumer, &provider),
                "grd2",
                "c ↦ sp ∈ consumer_sp"
            );
            let space = space_of(s, consumer);
            guard!(
                name,
                !s.restricted_sp_list.contains_pair(&provider, &space),
                "grd3",
                "sp ↦ MyHR(c) ∉ restricted_sp_list"
            );
            control_guard!(name, s, actor, consumer);
            let link = (provider, space);
            let mut next = s.clone();
            next.restricted_sp_list.insert(link);
            next.general_sp_list.remove(&link);
            next.revoked_sp_list.remove(&link);
            reset_provider_access(&mut next, provider, space);
            Ok(next)
        }

        Event::RevokeAccessSp {
            actor,
            consumer,
            provider,
        } => {
            guard!(
                name,
                s.consumers.contains(&consumer),
                "grd1_r1",
                "c ↦ mhr ∈ MyHR"
            );
            guard!(
                name,
                s.consumer_sp.contains_pair(&consumer, &provider),
                "grd2_r1",
                "c ↦ sp ∈ consumer_sp"
            );
            let mhr = space_of(s, consumer);
            guard!(
                name,
                !s.revoked_sp_list.contains_pair(&provider, &mhr),
                "grd3_r1",
                "sp ↦ MyHR(c) ∉ revoked_sp_list"
            );
            control_guard!(name, s, actor, consumer);
            let link = (provider, mhr);
            let sp = FiniteSet::singleton(provider);
            let in_mhr = s.records_mhr.inverse().image(&FiniteSet::singleton(mhr));
            let mut next = s.clone();
            // act1_r1 .. act3_r1
            next.revoked_sp_list = s.revoked_sp_list.union(&FiniteSet::singleton(link));
            next.restricted_sp_list = s.restricted_sp_list.difference(&FiniteSet::singleton(link));
            next.general_sp_list = s.general_sp_list.difference(&FiniteSet::singleton(link));
            // act4_r1
            if mutant != Some(Mutant::DropAct4R1) {
                next.general_sp_access = s.general_sp_access.difference(
                    &s.general_sp_access
                        .domain_restrict(&sp)
                        .range_restrict(&in_mhr),
                );
            }
            // act5_r1
            next.restricted_sp_access = s.restricted_sp_access.difference(
                &s.restricted_sp_access
                    .domain_restrict(&sp)
                    .range_restrict(&in_mhr),
            );
            Ok(next)
        }

        Event::UploadGeneralRecordSp {
            provider,
            consumer,
            record,
        } => {
            guard!(
                name,
                s.consumers.contains(&consumer),
                "grd1",
                "c ∈ consumer"
            );
            let space = space_of(s, consumer);
            guard!(
                name,
                s.general_sp_list.contains_pair(&provider, &space)
                    || s.restricted_sp_list.contains_pair(&provider, &space),
                "grd2",
                "sp ↦ MyHR(c) ∈ general_sp_list ∪ restricted_sp_list"
            );
            guard!(
                name,
                !s.records.contains(&record),
                "grd3",
                "r ∈ RESOURCES \\ records"
            );
            Ok(upload(s, record, space, consumer, RecordCategory::General))
        }

        Event::UploadRestrictedRecordSp {
            provider,
            consumer,
            record,
        } => {
            guard!(
                name,
                s.consumers.contains(&consumer),
                "grd1",
                "c ∈ consumer"
            );
            let space = space_of(s, consumer);
            guard!(
                name,
                s.restricted_sp_list.contains_pair(&provider, &space),
                "grd2",
                "sp ↦ MyHR(c) ∈ restricted_sp_list"
            );
            guard!(
                name,
                !s.records.contains(&record),
                "grd3",
                "r ∈ RESOURCES \\ records"
            );
            Ok(upload(
                s,
                record,
                space,
                consumer,
                RecordCategory::Restricted,
            ))
        }

        Event::AddNominatedGeneral {
            actor,
            consumer,
            nominee,
        }
        | Event::AddNominatedRestricted {
            actor,
            consumer,
            nominee,
        } => {
            guard!(
                name,
                s.consumers.contains(&consumer),
                "grd1",
                "c ∈ consumer"
            );
            guard!(name, s.consumers.contains(&nominee), "grd2", "n ∈ consumer");
            guard!(name, consumer != nominee, "grd3", "c ≠ n");
            let space = space_of(s, consumer);
            guard!(
                name,
                !s.general_nominated.contains_pair(&nominee, &space),
                "grd4",
                "n ↦ MyHR(c) ∉ general_nominated"
            );
            guard!(
                name,
                !s.restricted_nominated.contains_pair(&nominee, &space),
                "grd5",
                "n ↦ MyHR(c) ∉ restricted_nominated"
            );
            guard!(
                name,
                !s.full_access_nominated.contains_pair(&nominee, &space),
                "grd6",
                "n ↦ MyHR(c) ∉ full_access_nominated"
            );
            control_guard!(name, s, actor, consumer);
            let mut next = s.clone();
            if matches!(event, Event::AddNominatedGeneral { .. }) {
                next.general_nominated.insert((nominee, space));
            } else {
                next.restricted_nominated.insert((nominee, space));
            }
            reset_nominee_access(&mut next, nominee, space);
            Ok(next)
        }

        Event::GrantFullAccessToNominated {
            actor,
            consumer,
            nominee,
        } => {
            if mutant != Some(Mutant::DropGrd1R2) {
                guard!(name, consumer != nominee, "grd1_r2", "c ≠ n");
            }
            guard!(
                name,
                s.consumers.contains(&consumer),
                "grd2_r2",
                "c ↦ mhr ∈ MyHR"
            );
            let mhr = space_of(s, consumer);
            guard!(
                name,
                !s.general_nominated.contains_pair(&nominee, &mhr),
                "grd3_r2",
                "n ↦ mhr ∉ general_nominated"
            );
            guard!(
                name,
                !s.restricted_nominated.contains_pair(&nominee, &mhr),
                "grd4_r2",
                "n ↦ mhr ∉ restricted_nominated"
            );
            guard!(
                name,
                !s.full_access_nominated.contains_pair(&nominee, &mhr),
                "grd5_r2",
                "n ↦ mhr ∉ full_access_nominated"
            );
            guard!(
                name,
                s.consumers.contains(&nominee),
                "grd6_r2",
                "n ∈ consumer"
            );
            control_guard!(name, s, actor, consumer);
            let link = FiniteSet::singleton((nominee, mhr));
            let visible = s.general_records.union(&s.restricted_records);
            let mut next = s.clone();
            // act1_r2, act2_r2
            next.restricted_nominated = s.restricted_nominated.union(&link);
            next.full_access_nominated = s.full_access_nominated.union(&link);
            // act3_r2
            let granted = FiniteSet::singleton(nominee).cartesian_product(
                &s.records_mhr
                    .range_restrict(&FiniteSet::singleton(mhr))
                    .domain_restrict(&visible)
                    .dom(),
            );
            next.restricted_nominated_access = s.restricted_nominated_access.union(&granted);
            Ok(next)
        }

        Event::RemoveNominated {
            actor,
            consumer,
            nominee,
        } => {
            guard!(
                name,
                s.consumers.contains(&consumer),
                "grd1",
                "c ∈ consumer"
            );
            let space = space_of(s, consumer);
            guard!(
                name,
                s.nominee_list_of(nominee, space).is_some(),
                "grd2",
                "n ↦ MyHR(c) ∈ general_nominated ∪ restricted_nominated ∪ full_access_nominated"
            );
            control_guard!(name, s, actor, consumer);
            let link = (nominee, space);
            let mut next = s.clone();
            next.general_nominated.remove(&link);
            next.restricted_nominated.remove(&link);
            next.full_access_nominated.remove(&link);
            reset_nominee_access(&mut next, nominee, space);
            Ok(next)
        }

        Event::UploadGeneralRecordNominated {
            nominee,
            consumer,
            record,
        }
        | Event::UploadRestrictedRecordNominated {
            nominee,
            consumer,
            record,
        } => {
            guard!(
                name,
                s.consumers.contains(&consumer),
                "grd1",
                "c ∈ consumer"
            );
            let space = space_of(s, consumer);
            guard!(
                name,
                s.full_access_nominated.contains_pair(&nominee, &space),
                "grd2",
                "n ↦ MyHR(c) ∈ full_access_nominated"
            );
            guard!(
                name,
                !s.records.contains(&record),
                "grd3",
                "r ∈ RESOURCES \\ records"
            );
            let category = if matches!(event, Event::UploadGeneralRecordNominated { .. }) {
                RecordCategory::General
            } else {
                RecordCategory::Restricted
            };
            Ok(upload(s, record, space, consumer, category))
        }

        Event::AssignAuthorisedRep {
            operator,
            rep,
            consumer,
        } => {
            guard!(
                name,
                s.system_operators.contains(&operator),
                "grd1",
                "op ∈ system_operator"
            );
            guard!(
                name,
                s.consumers.contains(&consumer),
                "grd2",
                "c ∈ consumer"
            );
            guard!(name, s.consumers.contains(&rep), "grd3", "a ∈ consumer");
            if mutant != Some(Mutant::AuthorisedRepSelf) {
                guard!(name, rep != consumer, "grd4", "a ≠ c");
            }
            let space = space_of(s, consumer);
            guard!(
                name,
                !s.authorised_rep.contains_pair(&rep, &space),
                "grd5",
                "a ↦ MyHR(c) ∉ authorised_rep"
            );
            let mut next = s.clone();
            next.authorised_rep.insert((rep, space));
            Ok(next)
        }

        Event::RemoveAuthorisedRep {
            operator,
            rep,
            consumer,
        } => {
            guard!(
                name,
                s.system_operators.contains(&operator),
                "grd1",
                "op ∈ system_operator"
            );
            guard!(
                name,
                s.consumers.contains(&consumer),
                "grd2",
                "c ∈ consumer"
            );
            let space = space_of(s, consumer);
            guard!(
                name,
                s.authorised_rep.contains_pair(&rep, &space),
                "grd3",
                "a ↦ MyHR(c) ∈ authorised_rep"
            );
            let mut next = s.clone();
            next.authorised_rep.remove(&(rep, space));
            Ok(next)
        }
    }
}

/// `MyHR(c)` for a consumer already checked by a guard.
fn space_of(s: &SystemState, consumer: PersonId) -> SpaceId {
    s.space_of_consumer(consumer)
        .expect("guarded consumer has exactly one space")
}

fn add_record(
    next: &mut SystemState,
    record: RecordId,
    space: SpaceId,
    owner: PersonId,
    category: RecordCategory,
) {
    next.records.insert(record);
    next.records_mhr.insert((record, space));
    next.consumer_own_records.insert((record, owner));
    match category {
        RecordCategory::General => next.general_records.insert(record),
        RecordCategory::Restricted => next.restricted_records.insert(record),
        RecordCategory::Hidden => next.hidden_records.insert(record),
    };
}

fn upload(
    s: &SystemState,
    record: RecordId,
    space: SpaceId,
    owner: PersonId,
    category: RecordCategory,
) -> SystemState {
    let mut next = s.clone();
    add_record(&mut next, record, space, owner, category);
    grant_record_access(s, &mut next, record, space, category);
    next
}

fn providers_listed(
    list: &crate::relations::Relation<ProviderId, SpaceId>,
    space: SpaceId,
) -> Vec<ProviderId> {
    list.iter()
        .filter(|(_, m)| *m == space)
        .map(|(sp, _)| *sp)
        .collect()
}

fn nominees_listed(
    list: &crate::relations::Relation<PersonId, SpaceId>,
    space: SpaceId,
) -> Vec<PersonId> {
    list.iter()
        .filter(|(_, m)| *m == space)
        .map(|(n, _)| *n)
        .collect()
}

/// Adds the access pairs granted by `record` becoming `category` in `space`.
/// List membership is read from the pre-state.
fn grant_record_access(
    s: &SystemState,
    next: &mut SystemState,
    record: RecordId,
    space: SpaceId,
    category: RecordCategory,
) {
    let general_sps = providers_listed(&s.general_sp_list, space);
    let restricted_sps = providers_listed(&s.restricted_sp_list, space);
    let general_noms = nominees_listed(&s.general_nominated, space);
    let restricted_noms = nominees_listed(&s.restricted_nominated, space);
    match category {
        RecordCategory::General => {
            for sp in general_sps {
                next.general_sp_access.insert((sp, record));
                next.restricted_sp_access.insert((sp, record));
            }
            for sp in restricted_sps {
                next.restricted_sp_access.insert((sp, record));
            }
            for n in general_noms {
                next.general_nominated_access.insert((n, record));
                next.restricted_nominated_access.insert((n, record));
            }
            for n in restricted_noms {
                next.restricted_nominated_access.insert((n, record));
            }
        }
        RecordCategory::Restricted => {
            for sp in restricted_sps {
                next.restricted_sp_access.insert((sp, record));
            }
            for n in restricted_noms {
                next.restricted_nominated_access.insert((n, record));
            }
        }
        RecordCategory::Hidden => {}
    }
}

fn drop_record_access(next: &mut SystemState, record: RecordId) {
    next.general_sp_access.retain(|(_, r)| *r != record);
    next.restricted_sp_access.retain(|(_, r)| *r != record);
    next.general_nominated_access.retain(|(_, r)| *r != record);
    next.restricted_nominated_access
        .retain(|(_, r)| *r != record);
}

fn recategorise_access(
    s: &SystemState,
    next: &mut SystemState,
    record: RecordId,
    category: RecordCategory,
) {
    drop_record_access(next, record);
    let space = s.space_of_record(record).expect("records_mhr is total");
    grant_record_access(s, next, record, space, category);
}

/// Recomputes one provider's access to one space from its current list in
/// `next`.
fn reset_provider_access(next: &mut SystemState, provider: ProviderId, space: SpaceId) {
    let in_space = next.records_in_space(space);
    next.general_sp_access
        .retain(|(sp, r)| *sp != provider || !in_space.contains(r));
    next.restricted_sp_access
        .retain(|(sp, r)| *sp != provider || !in_space.contains(r));
    let general = in_space.intersection(&next.general_records);
    let restricted = in_space.intersection(&next.restricted_records);
    if next.general_sp_list.contains_pair(&provider, &space) {
        for r in general.iter() {
            next.general_sp_access.insert((provider, *r));
            next.restricted_sp_access.insert((provider, *r));
        }
    } else if next.restricted_sp_list.contains_pair(&provider, &space) {
        for r in general.union(&restricted).iter() {
            next.restricted_sp_access.insert((provider, *r));
        }
    }
}

/// Recomputes one nominee's access to one space from its current lists in
/// `next`.
fn reset_nominee_access(next: &mut SystemState, nominee: PersonId, space: SpaceId) {
    let in_space = next.records_in_space(space);
    next.general_nominated_access
        .retain(|(n, r)| *n != nominee || !in_space.contains(r));
    next.restricted_nominated_access
        .retain(|(n, r)| *n != nominee || !in_space.contains(r));
    let general = in_space.intersection(&next.general_records);
    let restricted = in_space.intersection(&next.restricted_records);
    if next.general_nominated.contains_pair(&nominee, &space) {
        for r in general.iter() {
            next.general_nominated_access.insert((nominee, *r));
            next.restricted_nominated_access.insert((nominee, *r));
        }
    }
    if next.restricted_nominated.contains_pair(&nominee, &space) {
        for r in general.union(&restricted).iter() {
            next.restricted_nominated_access.insert((nominee, *r));
        }
    }
}

/// Removes everything that referred to the departing consumer or their space.
fn cascade_opt_out(s: &SystemState, next: &mut SystemState, consumer: PersonId, space: SpaceId) {
    let gone = s.records_in_space(space);
    next.records = s.records.difference(&gone);
    next.general_records = s.general_records.difference(&gone);
    next.restricted_records = s.restricted_records.difference(&gone);
    next.hidden_records = s.hidden_records.difference(&gone);
    next.records_mhr = s.records_mhr.domain_subtract(&gone);
    next.consumer_own_records = s.consumer_own_records.domain_subtract(&gone);

    let departing = FiniteSet::singleton(consumer);
    let spaces = FiniteSet::singleton(space);
    next.consumer_sp = s.consumer_sp.domain_subtract(&departing);
    next.sp_mhr_access = s.sp_mhr_access.range_subtract(&spaces);
    next.general_sp_list = s.general_sp_list.range_subtract(&spaces);
    next.restricted_sp_list = s.restricted_sp_list.range_subtract(&spaces);
    next.revoked_sp_list = s.revoked_sp_list.range_subtract(&spaces);
    next.general_sp_access = s.general_sp_access.range_subtract(&gone);
    next.restricted_sp_access = s.restricted_sp_access.range_subtract(&gone);

    next.general_nominated = s
        .general_nominated
        .domain_subtract(&departing)
        .range_subtract(&spaces);
    next.restricted_nominated = s
        .restricted_nominated
        .domain_subtract(&departing)
        .range_subtract(&spaces);
    next.full_access_nominated = s
        .full_access_nominated
        .domain_subtract(&departing)
        .range_subtract(&spaces);
    next.general_nominated_access = s
        .general_nominated_access
        .domain_subtract(&departing)
        .range_subtract(&gone);
    next.restricted_nominated_access = s
        .restricted_nominated_access
        .domain_subtract(&departing)
        .range_subtract(&gone);
    next.authorised_rep = s
        .authorised_rep
        .domain_subtract(&departing)
        .range_subtract(&spaces);
}
