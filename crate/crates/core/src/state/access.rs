use crate::ids::{ActorRef, RecordId};

use super::{StateError, SystemState};

/// Whether `actor` may read `record` in state `s`.
///
/// Owners and authorised representatives of the record's space see every
/// non-hidden record. Providers and nominees see exactly what the restricted
/// access relations grant them; those relations never contain hidden records
/// or revoked providers. Operators read nothing.
pub fn can_view(s: &SystemState, actor: ActorRef, record: RecordId) -> Result<bool, StateError> {
    if !s.records.contains(&record) {
        return Err(StateError::UnknownRecord(record));
    }
    let hidden = s.hidden_records.contains(&record);
    let allowed = match actor {
        ActorRef::Consumer(person) => {
            let owner = s.consumer_own_records.contains_pair(&record, &person);
            let authorised = s
                .space_of_record(record)
                .is_some_and(|space| s.authorised_rep.contains_pair(&person, &space));
            ((owner || authorised) && !hidden)
                || s.restricted_nominated_access
                    .contains_pair(&person, &record)
        }
        ActorRef::Provider(provider) => s.restricted_sp_access.contains_pair(&provider, &record),
        ActorRef::Operator(_) => false,
    };
    Ok(allowed)
}
