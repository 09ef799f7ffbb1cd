//! Sequential rules: seq-Thiele, Greedy Monroe and seq-Phragmén.
//!
//! All ties are broken towards the lowest candidate index, and Greedy Monroe
//! removes the lowest-index voters first.

use std::cmp::Ordering;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{integer, ApprovalProfile, Bitset, CandidateId, Committee, Rational, VoterId};
use crate::rules::ThieleRule;
use crate::scoring::ThieleWeights;

/// Per-voter Phragmén loads after `round` selections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadVector {
    pub loads: Vec<Rational>,
    pub round: usize,
}

impl LoadVector {
    pub fn zero(num_voters: usize) -> Self {
        LoadVector {
            loads: vec![Rational::zero(); num_voters],
            round: 0,
        }
    }

    pub fn total(&self) -> Rational {
        self.loads.iter().sum()
    }

    pub fn max(&self) -> Rational {
        self.loads.iter().max().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn load(&self, voter: VoterId) -> &Rational {
        &self.loads[voter.0]
    }
}

/// What happened in one round of a sequential rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Round {
    pub candidate: CandidateId,
    /// Marginal score (seq-Thiele), satisfied group size (Greedy Monroe) or
    /// load threshold `t` (seq-Phragmén).
    pub value: Rational,
    /// Voters removed in this round; Greedy Monroe only.
    pub removed: Vec<VoterId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SeqTrace {
    pub order: Vec<CandidateId>,
    pub rounds: Vec<Round>,
}

impl SeqTrace {
    fn push(&mut self, candidate: CandidateId, value: Rational, removed: Vec<VoterId>) {
        self.order.push(candidate);
        self.rounds.push(Round {
            candidate,
            value,
            removed,
        });
    }

    /// The committee after the first `j` rounds.
    pub fn prefix(&self, j: usize) -> Committee {
        Committee::new(self.order[..j].iter().copied()).expect("distinct selections")
    }

    fn committee(&self) -> Committee {
        self.prefix(self.order.len())
    }
}

fn check_size(profile: &ApprovalProfile, k: usize) -> Result<()> {
    if k == 0 || k > profile.num_candidates() {
        return Err(Error::domain(format!(
            "committee size {k} must lie in 1..={}",
            profile.num_candidates()
        )));
    }
    Ok(())
}

/// Greedy Thiele rule: each round adds the candidate with the largest marginal score.
pub fn seq_thiele(rule: &ThieleRule, profile: &ApprovalProfile, k: usize) -> Result<(Committee, SeqTrace)> {
    check_size(profile, k)?;
    let weights = ThieleWeights::new(rule, k, profile.num_voters())?;
    let gains: Vec<Rational> = (1..=k).map(|t| weights.weight(t)).collect();
    let mut counts = vec![0usize; profile.num_voters()];
    let mut chosen = Bitset::new(profile.num_candidates());
    let mut trace = SeqTrace::default();
    for _ in 0..k {
        let mut best: Option<(Rational, usize)> = None;
        for c in (0..profile.num_candidates()).filter(|&c| !chosen.contains(c)) {
            let gain: Rational = profile
                .approver_set(CandidateId(c))
                .iter()
                .map(|v| &gains[counts[v]])
                .sum();
            if best.as_ref().is_none_or(|(b, _)| gain > *b) {
                best = Some((gain, c));
            }
        }
        let (gain, c) = best.expect("k ≤ m leaves a candidate");
        chosen.insert(c);
        for v in profile.approver_set(CandidateId(c)).iter() {
            counts[v] += 1;
        }
        trace.push(CandidateId(c), gain, Vec::new());
    }
    Ok((trace.committee(), trace))
}

/// Greedy Monroe with group sizes `⌈n/k⌉` for the first `n mod k` rounds and
/// `⌊n/k⌋` afterwards.
pub fn greedy_monroe(profile: &ApprovalProfile, k: usize) -> Result<(Committee, SeqTrace)> {
    check_size(profile, k)?;
    let n = profile.num_voters();
    let mut remaining = Bitset::from_indices(n, 0..n);
    let mut chosen = Bitset::new(profile.num_candidates());
    let mut trace = SeqTrace::default();
    for round in 0..k {
        let size = n / k + usize::from(round < n % k);
        let mut best: Option<(usize, usize)> = None;
        for c in (0..profile.num_candidates()).filter(|&c| !chosen.contains(c)) {
            let value = profile.approver_set(CandidateId(c)).intersection_count(&remaining).min(size);
            if best.is_none_or(|(b, _)| value > b) {
                best = Some((value, c));
            }
        }
        let (value, c) = best.expect("k ≤ m leaves a candidate");
        let approvers = profile.approver_set(CandidateId(c));
        let mut group: Vec<usize> = remaining.iter().filter(|&v| approvers.contains(v)).take(value).collect();
        let padding: Vec<usize> = remaining
            .iter()
            .filter(|&v| !approvers.contains(v))
            .take(size - group.len())
            .collect();
        group.extend(padding);
        group.sort_unstable();
        for &v in &group {
            remaining.remove(v);
        }
        chosen.insert(c);
        trace.push(
            CandidateId(c),
            integer(value as u128),
            group.into_iter().map(VoterId).collect(),
        );
    }
    Ok((trace.committee(), trace))
}

/// Water-filling level `t` with `Σ_{j ∈ approvers} max(0, t − ℓ_j) = 1`.
pub fn phragmen_round_threshold(loads: &LoadVector, approvers: &[VoterId]) -> Result<Rational> {
    if approvers.is_empty() {
        return Err(Error::Infeasible("candidate has no approvers to carry its load".into()));
    }
    let mut levels: Vec<&Rational> = approvers.iter().map(|v| &loads.loads[v.0]).collect();
    levels.sort();
    let mut budget = integer(1);
    for q in 1..=levels.len() {
        budget += levels[q - 1];
        let t = &budget / integer(q as u128);
        if q == levels.len() || &t <= levels[q] {
            return Ok(t);
        }
    }
    unreachable!("the last prefix always qualifies")
}

/// Sequential Phragmén without redistribution of earlier loads.
///
/// Each round picks the candidate minimising the resulting maximum load, then
/// its own threshold, then its index.
pub fn seq_phragmen(profile: &ApprovalProfile, k: usize) -> Result<(Committee, SeqTrace, LoadVector)> {
    check_size(profile, k)?;
    let eligible: Vec<usize> = (0..profile.num_candidates())
        .filter(|&c| profile.approval_count(CandidateId(c)) > 0)
        .collect();
    if eligible.len() < k {
        return Err(Error::Infeasible(format!(
            "only {} candidates have approvers, committee size is {k}",
            eligible.len()
        )));
    }
    let mut loads = LoadVector::zero(profile.num_voters());
    let mut global_max = Rational::zero();
    let mut chosen = Bitset::new(profile.num_candidates());
    let mut trace = SeqTrace::default();
    for _ in 0..k {
        let mut best: Option<(Rational, Rational, usize)> = None;
        for &c in eligible.iter().filter(|&&c| !chosen.contains(c)) {
            let approvers: Vec<VoterId> = profile.approver_set(CandidateId(c)).iter().map(VoterId).collect();
            let t = phragmen_round_threshold(&loads, &approvers)?;
            let peak = if t > global_max { t.clone() } else { global_max.clone() };
            let better = match &best {
                None => true,
                Some((bp, bt, _)) => match peak.cmp(bp) {
                    Ordering::Less => true,
                    Ordering::Equal => t < *bt,
                    Ordering::Greater => false,
                },
            };
            if better {
                best = Some((peak, t, c));
            }
        }
        let (peak, t, c) = best.expect("enough eligible candidates");
        for v in profile.approver_set(CandidateId(c)).iter() {
            if loads.loads[v] < t {
                loads.loads[v] = t.clone();
            }
        }
        loads.round += 1;
        global_max = peak;
        chosen.insert(c);
        trace.push(CandidateId(c), t, Vec::new());
    }
    Ok((trace.committee(), trace, loads))
}
