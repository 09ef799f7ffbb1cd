//! Efficiency (committee domination) and lower quota on party-list profiles.

use crate::error::{Error, Result};
use crate::exact::Enumerator;
use crate::model::{next_combination, unrank, ApprovalProfile, Bitset, CandidateId, Committee, VoterId};
use crate::par::{any_indexed, map_indexed};

const CHUNK: u128 = 2048;

/// A committee dominating another, with a voter who is strictly better off.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominationWitness {
    pub dominator: Committee,
    pub strictly_better_voter: VoterId,
}

/// Voters of one party together with the number of seats lower quota owes them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohesiveGroup {
    pub voters: Vec<VoterId>,
    pub level: usize,
    pub common_candidates: Vec<CandidateId>,
}

/// Per ballot group: how many members of `w` the group approves.
fn group_counts(profile: &ApprovalProfile, w: &Bitset) -> Vec<usize> {
    profile.groups().iter().map(|g| g.ballot.intersection_count(w)).collect()
}

/// First voter (by index) strictly better off under `better`, provided
/// nobody is worse off.
fn strict_voter(profile: &ApprovalProfile, better: &Bitset, base: &[usize]) -> Option<VoterId> {
    let mut strict: Option<usize> = None;
    for (g, group) in profile.groups().iter().enumerate() {
        let c = group.ballot.intersection_count(better);
        if c < base[g] {
            return None;
        }
        if c > base[g] && strict.is_none_or(|v| group.first_voter < v) {
            strict = Some(group.first_voter);
        }
    }
    strict.map(VoterId)
}

fn same_size(w1: &Committee, w2: &Committee) -> Result<()> {
    if w1.size() != w2.size() {
        return Err(Error::domain(format!(
            "cannot compare committees of sizes {} and {}",
            w1.size(),
            w2.size()
        )));
    }
    Ok(())
}

/// Whether `w1` dominates `w2`: no voter approves fewer members of `w1`, and
/// some voter approves more.
pub fn dominates(profile: &ApprovalProfile, w1: &Committee, w2: &Committee) -> Result<bool> {
    same_size(w1, w2)?;
    profile.check_committee(w1)?;
    profile.check_committee(w2)?;
    let m = profile.num_candidates();
    let base = group_counts(profile, &w2.to_bitset(m));
    Ok(strict_voter(profile, &w1.to_bitset(m), &base).is_some())
}

/// The lexicographically first committee of the same size dominating `w`.
pub fn find_dominator(profile: &ApprovalProfile, w: &Committee, enumerator: &Enumerator) -> Result<Option<DominationWitness>> {
    profile.check_committee(w)?;
    let (m, k) = (profile.num_candidates(), w.size());
    let total = enumerator.check(m, k)?;
    let base = group_counts(profile, &w.to_bitset(m));
    let chunks = total.div_ceil(CHUNK) as usize;
    let hits = map_indexed(chunks, enumerator.execution, |chunk| {
        let start = chunk as u128 * CHUNK;
        let mut combo = unrank(m, k, start).expect("rank in range");
        for step in 0..CHUNK.min(total - start) {
            if step > 0 {
                next_combination(&mut combo, m);
            }
            let set = Bitset::from_indices(m, combo.iter().copied());
            if let Some(voter) = strict_voter(profile, &set, &base) {
                return Some(DominationWitness {
                    dominator: Committee::from_indices(combo.iter().copied()).expect("distinct"),
                    strictly_better_voter: voter,
                });
            }
        }
        None
    });
    Ok(hits.into_iter().flatten().next())
}

/// Whether any committee of the same size dominates `w`; stops at the first hit.
pub fn is_dominated(profile: &ApprovalProfile, w: &Committee, enumerator: &Enumerator) -> Result<bool> {
    profile.check_committee(w)?;
    let (m, k) = (profile.num_candidates(), w.size());
    let total = enumerator.check(m, k)?;
    let base = group_counts(profile, &w.to_bitset(m));
    let chunks = total.div_ceil(CHUNK) as usize;
    Ok(any_indexed(chunks, enumerator.execution, |chunk| {
        let start = chunk as u128 * CHUNK;
        let mut combo = unrank(m, k, start).expect("rank in range");
        (0..CHUNK.min(total - start)).any(|step| {
            if step > 0 {
                next_combination(&mut combo, m);
            }
            strict_voter(profile, &Bitset::from_indices(m, combo.iter().copied()), &base).is_some()
        })
    }))
}

/// The lexicographically first committee dominating every member of a
/// winning set. A rule is efficient on an instance iff this is `None`.
pub fn find_common_dominator(profile: &ApprovalProfile, winners: &[Committee], enumerator: &Enumerator) -> Result<Option<Committee>> {
    let Some(first) = winners.first() else {
        return Err(Error::domain("the winning set is empty"));
    };
    for w in winners {
        same_size(first, w)?;
        profile.check_committee(w)?;
    }
    let (m, k) = (profile.num_candidates(), first.size());
    let total = enumerator.check(m, k)?;
    let bases: Vec<Vec<usize>> = winners.iter().map(|w| group_counts(profile, &w.to_bitset(m))).collect();
    let chunks = total.div_ceil(CHUNK) as usize;
    let hits = map_indexed(chunks, enumerator.execution, |chunk| {
        let start = chunk as u128 * CHUNK;
        let mut combo = unrank(m, k, start).expect("rank in range");
        for step in 0..CHUNK.min(total - start) {
            if step > 0 {
                next_combination(&mut combo, m);
            }
            let set = Bitset::from_indices(m, combo.iter().copied());
            if bases.iter().all(|base| strict_voter(profile, &set, base).is_some()) {
                return Some(Committee::from_indices(combo.iter().copied()).expect("distinct"));
            }
        }
        None
    });
    Ok(hits.into_iter().flatten().next())
}

/// Any two ballots are equal or disjoint.
pub fn is_party_list(profile: &ApprovalProfile) -> bool {
    let groups = profile.groups();
    groups
        .iter()
        .enumerate()
        .all(|(i, a)| groups[i + 1..].iter().all(|b| !a.ballot.intersects(&b.ballot)))
}

/// Parties entitled to at least one seat: a party of `g` voters approving `B`
/// is owed `min(|B|, ⌊g·k/n⌋)` members.
pub fn cohesive_groups(profile: &ApprovalProfile, k: usize) -> Result<Vec<CohesiveGroup>> {
    if !is_party_list(profile) {
        return Err(Error::domain("lower quota is only defined for party-list profiles"));
    }
    let n = profile.num_voters();
    let mut out = Vec::new();
    for (g, group) in profile.groups().iter().enumerate() {
        let level = group.ballot.count().min(group.multiplicity * k / n);
        if level == 0 {
            continue;
        }
        let voters = (0..n).map(VoterId).filter(|&v| profile.group_of(v) == g).collect();
        out.push(CohesiveGroup {
            voters,
            level,
            common_candidates: group.ballot.iter().map(CandidateId).collect(),
        });
    }
    Ok(out)
}

/// Whether `w` gives every party at least its lower quota.
pub fn lower_quota_holds(profile: &ApprovalProfile, k: usize, w: &Committee) -> Result<bool> {
    profile.check_committee(w)?;
    Ok(cohesive_groups(profile, k)?
        .iter()
        .all(|group| group.common_candidates.iter().filter(|c| w.contains(**c)).count() >= group.level))
}
