use std::fmt;
use std::str::FromStr;

use crate::state::InvariantId;

/// Seeded kernel faults. Each drops an action or weakens a guard, and each
/// breaks an invariant the checker must be able to find.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mutant {
    /// `revoke_access_sp` forgets to strip general access (act4_r1).
    DropAct4R1,
    /// `grant_full_access_to_nominated` lets owners nominate themselves (grd1_r2).
    DropGrd1R2,
    /// `restrict_record` accepts hidden records (grd2).
    DropRestrictGrd2,
    /// `hide_record` leaves existing access pairs in place.
    HideKeepsAccess,
    /// `opt_out` removes only the consumer, space and mapping.
    OptOutNoCascade,
    /// `assign_authorised_rep` lets a consumer represent themselves (grd4).
    AuthorisedRepSelf,
    /// `assign_provider` never puts the provider in the general list.
    AssignSkipsList,
    /// `upload_record` does not extend the access relations.
    UploadSkipsAccess,
}

impl Mutant {
    pub const ALL: [Mutant; 8] = [
        Mutant::DropAct4R1,
        Mutant::DropGrd1R2,
        Mutant::DropRestrictGrd2,
        Mutant::HideKeepsAccess,
        Mutant::OptOutNoCascade,
        Mutant::AuthorisedRepSelf,
        Mutant::AssignSkipsList,
        Mutant::UploadSkipsAccess,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutant::DropAct4R1 => "drop_act4_r1",
            Mutant::DropGrd1R2 => "drop_grd1_r2",
            Mutant::DropRestrictGrd2 => "drop_restrict_grd2",
            Mutant::HideKeepsAccess => "hide_keeps_access",
            Mutant::OptOutNoCascade => "opt_out_no_cascade",
            Mutant::AuthorisedRepSelf => "authorised_rep_self",
            Mutant::AssignSkipsList => "assign_skips_list",
            Mutant::UploadSkipsAccess => "upload_skips_access",
        }
    }

    /// The invariant this fault is expected to break.
    pub fn expected_violation(self) -> InvariantId {
        match self {
            Mutant::DropAct4R1 => InvariantId::Inv9,
            Mutant::DropGrd1R2 => InvariantId::Inv14,
            Mutant::DropRestrictGrd2 => InvariantId::Inv5,
            Mutant::HideKeepsAccess => InvariantId::Inv9,
            Mutant::OptOutNoCascade => InvariantId::Inv6,
            Mutant::AuthorisedRepSelf => InvariantId::Inv18,
            Mutant::AssignSkipsList => InvariantId::Inv8,
            Mutant::UploadSkipsAccess => InvariantId::Inv9,
        }
    }
}

impl fmt::Display for Mutant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mutant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Mutant::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Mutant::ALL.iter().map(|m| m.name()).collect();
                format!(
                    "unknown mutant `{s}` (expected one of: {})",
                    names.join(", ")
                )
            })
    }
}
