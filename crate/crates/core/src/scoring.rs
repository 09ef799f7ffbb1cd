//! Exact committee scores: AV, CC, PAV, p-geometric and Monroe.
//!
//! Thiele scores are driven by a cumulative satisfaction table
//! `f(t) = Σ_{j ≤ t} w_j` indexed by `|A(i) ∩ W|`. The table is kept both as
//! exact rationals and, when it fits, as `u128` integers scaled by the lcm of
//! its denominators; the scaled form is what the enumeration hot loop uses.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::model::{integer, ApprovalProfile, Bitset, CandidateId, Committee, Rational};
use crate::rules::{check_p, ThieleRule};

/// Harmonic numbers `H(0..=k_max)` as exact rationals.
#[derive(Clone, Debug)]
pub struct HarmonicTable {
    values: Vec<Rational>,
}

impl HarmonicTable {
    pub fn new(k_max: usize) -> Self {
        let mut values = Vec::with_capacity(k_max + 1);
        let mut acc = Rational::zero();
        values.push(acc.clone());
        for t in 1..=k_max {
            acc += Rational::new(BigInt::one(), BigInt::from(t));
            values.push(acc.clone());
        }
        HarmonicTable { values }
    }

    pub fn get(&self, t: usize) -> &Rational {
        &self.values[t]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Cumulative satisfaction table of a Thiele rule for counts `0..=k`.
#[derive(Clone, Debug)]
pub struct ThieleWeights {
    exact: Vec<Rational>,
    scaled: Option<ScaledTable>,
}

#[derive(Clone, Debug)]
pub(crate) struct ScaledTable {
    pub(crate) values: Vec<u128>,
    pub(crate) denom: BigInt,
}

impl ThieleWeights {
    /// Table for committees of size at most `k` in profiles with `n` voters.
    pub fn new(rule: &ThieleRule, k: usize, n: usize) -> Result<Self> {
        let exact: Vec<Rational> = match rule {
            ThieleRule::Av => (0..=k).map(|t| integer(t as u128)).collect(),
            ThieleRule::Cc => (0..=k).map(|t| integer(t.min(1) as u128)).collect(),
            ThieleRule::Pav => HarmonicTable::new(k).values,
            ThieleRule::Geometric(p) => {
                check_p(p)?;
                let ratio = p.recip();
                let mut acc = Rational::zero();
                let mut weight = Rational::one();
                let mut table = vec![acc.clone()];
                for _ in 1..=k {
                    weight *= &ratio;
                    acc += &weight;
                    table.push(acc.clone());
                }
                table
            }
        };
        let denom = exact
            .iter()
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let scaled_values: Option<Vec<u128>> = exact
            .iter()
            .map(|r| (r.numer() * (&denom / r.denom())).to_u128())
            .collect();
        let scaled = scaled_values.and_then(|values| {
            let top = *values.last()?;
            top.checked_mul(n.max(1) as u128)?;
            Some(ScaledTable { values, denom })
        });
        Ok(ThieleWeights { exact, scaled })
    }

    pub fn max_count(&self) -> usize {
        self.exact.len() - 1
    }

    /// `f(t)`, the satisfaction of a voter with `t` approved members.
    pub fn satisfaction(&self, t: usize) -> &Rational {
        &self.exact[t]
    }

    /// Marginal weight of the `t`-th approved member, `f(t) - f(t-1)`.
    pub fn weight(&self, t: usize) -> Rational {
        &self.exact[t] - &self.exact[t - 1]
    }

    pub(crate) fn scaled(&self) -> Option<&ScaledTable> {
        self.scaled.as_ref()
    }

    /// Exact score of a committee given as a candidate bitset.
    pub fn score_set(&self, profile: &ApprovalProfile, committee: &Bitset) -> Rational {
        if let Some(table) = &self.scaled {
            let raw = self.scaled_score(table, profile, committee);
            return Rational::new(BigInt::from(raw), table.denom.clone());
        }
        let mut total = Rational::zero();
        for group in profile.groups() {
            let t = group.ballot.intersection_count(committee);
            if t > 0 {
                total += &self.exact[t] * integer(group.multiplicity as u128);
            }
        }
        total
    }

    #[inline]
    pub(crate) fn scaled_score(&self, table: &ScaledTable, profile: &ApprovalProfile, committee: &Bitset) -> u128 {
        profile
            .groups()
            .iter()
            .map(|g| table.values[g.ballot.intersection_count(committee)] * g.multiplicity as u128)
            .sum()
    }
}

fn committee_set(profile: &ApprovalProfile, w: &Committee) -> Result<Bitset> {
    profile.check_committee(w)?;
    Ok(w.to_bitset(profile.num_candidates()))
}

/// Score of `w` under a Thiele rule.
pub fn thiele_score(rule: &ThieleRule, profile: &ApprovalProfile, w: &Committee) -> Result<Rational> {
    let set = committee_set(profile, w)?;
    let weights = ThieleWeights::new(rule, w.size(), profile.num_voters())?;
    Ok(weights.score_set(profile, &set))
}

/// `Σ_{c∈W} |N(c)|`
pub fn av_score(profile: &ApprovalProfile, w: &Committee) -> Result<Rational> {
    thiele_score(&ThieleRule::Av, profile, w)
}

/// `|N(W)|`
pub fn cc_score(profile: &ApprovalProfile, w: &Committee) -> Result<Rational> {
    thiele_score(&ThieleRule::Cc, profile, w)
}

/// `Σ_i H(|W ∩ A(i)|)`
pub fn pav_score(profile: &ApprovalProfile, w: &Committee) -> Result<Rational> {
    thiele_score(&ThieleRule::Pav, profile, w)
}

/// `Σ_i Σ_{j=1}^{|A(i)∩W|} p^-j`; `p < 1` is a domain error.
pub fn pgeometric_score(profile: &ApprovalProfile, w: &Committee, p: &Rational) -> Result<Rational> {
    check_p(p)?;
    thiele_score(&ThieleRule::Geometric(p.clone()), profile, w)
}

/// A Monroe assignment of every voter to a committee member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonroeAssignment {
    /// `mapping[i]` is the member voter `i` is assigned to.
    pub mapping: Vec<CandidateId>,
    /// Voters assigned to a member they approve.
    pub satisfied_count: usize,
}

impl MonroeAssignment {
    /// Number of voters assigned to each member, in committee order.
    pub fn loads(&self, w: &Committee) -> Vec<usize> {
        w.members()
            .iter()
            .map(|c| self.mapping.iter().filter(|m| *m == c).count())
            .collect()
    }
}

/// Monroe score and an optimal assignment witness.
pub fn monroe_score(profile: &ApprovalProfile, w: &Committee) -> Result<(Rational, MonroeAssignment)> {
    profile.check_committee(w)?;
    if w.size() == 0 {
        return Err(Error::domain("Monroe score needs a nonempty committee"));
    }
    let assignment = monroe_assignment(profile, w.members());
    Ok((integer(assignment.satisfied_count as u128), assignment))
}

/// Network for the Monroe satisfaction problem.
///
/// Every member may take `⌊n/k⌋` satisfied voters plus one extra slot drawn
/// from a shared pool of `n mod k`; unsatisfied voters can always be placed
/// afterwards in the remaining capacity, so the max flow is the Monroe score.
struct MonroeNetwork {
    net: FlowNetwork,
    extra_arcs: Vec<crate::flow::ArcId>,
    // (member position, group index, arc)
    match_arcs: Vec<(usize, usize, crate::flow::ArcId)>,
    floor: usize,
    remainder: usize,
}

const SOURCE: usize = 0;
const SINK: usize = 1;
const POOL: usize = 2;

fn build_monroe_network(profile: &ApprovalProfile, members: &[CandidateId]) -> MonroeNetwork {
    let n = profile.num_voters();
    let k = members.len();
    let (floor, remainder) = (n / k, n % k);
    let mut net = FlowNetwork::new(3 + k);
    if remainder > 0 {
        net.add_arc(SOURCE, POOL, remainder as i64);
    }
    let mut extra_arcs = Vec::with_capacity(k);
    for pos in 0..k {
        let node = 3 + pos;
        if floor > 0 {
            net.add_arc(SOURCE, node, floor as i64);
        }
        if remainder > 0 {
            extra_arcs.push(net.add_arc(POOL, node, 1));
        }
    }
    let mut match_arcs = Vec::new();
    for (g, group) in profile.groups().iter().enumerate() {
        let approved: Vec<usize> = (0..k).filter(|&pos| group.ballot.contains(members[pos].0)).collect();
        if approved.is_empty() {
            continue;
        }
        let node = net.add_node();
        net.add_arc(node, SINK, group.multiplicity as i64);
        for pos in approved {
            let arc = net.add_arc(3 + pos, node, group.multiplicity as i64);
            match_arcs.push((pos, g, arc));
        }
    }
    MonroeNetwork {
        net,
        extra_arcs,
        match_arcs,
        floor,
        remainder,
    }
}

/// Maximum number of satisfied voters over all Monroe assignments.
pub(crate) fn monroe_satisfied(profile: &ApprovalProfile, members: &[CandidateId]) -> usize {
    let mut network = build_monroe_network(profile, members);
    network.net.max_flow(SOURCE, SINK) as usize
}

fn monroe_assignment(profile: &ApprovalProfile, members: &[CandidateId]) -> MonroeAssignment {
    let mut network = build_monroe_network(profile, members);
    let flow = network.net.max_flow(SOURCE, SINK) as usize;
    let k = members.len();
    let n = profile.num_voters();

    let mut quota = vec![network.floor; k];
    let mut ceil_left = network.remainder;
    for (pos, arc) in network.extra_arcs.iter().enumerate() {
        if network.net.flow(*arc) > 0 {
            quota[pos] += 1;
            ceil_left -= 1;
        }
    }
    for q in quota.iter_mut() {
        if ceil_left == 0 {
            break;
        }
        if *q == network.floor {
            *q += 1;
            ceil_left -= 1;
        }
    }

    let mut mapping: Vec<Option<CandidateId>> = vec![None; n];
    let mut used = vec![0usize; k];
    let mut members_of_group: Vec<Vec<usize>> = vec![Vec::new(); profile.groups().len()];
    for v in 0..n {
        members_of_group[profile.group_of(crate::model::VoterId(v))].push(v);
    }
    let mut cursor = vec![0usize; profile.groups().len()];
    for &(pos, g, arc) in &network.match_arcs {
        for _ in 0..network.net.flow(arc) {
            let v = members_of_group[g][cursor[g]];
            cursor[g] += 1;
            mapping[v] = Some(members[pos]);
            used[pos] += 1;
        }
    }
    let mut pos = 0;
    for slot in mapping.iter_mut().filter(|s| s.is_none()) {
        while used[pos] >= quota[pos] {
            pos += 1;
        }
        *slot = Some(members[pos]);
        used[pos] += 1;
    }
    let mapping: Vec<CandidateId> = mapping.into_iter().map(|c| c.expect("every voter assigned")).collect();
    let satisfied_count = mapping
        .iter()
        .enumerate()
        .filter(|(v, c)| profile.ballots()[*v].contains(c.0))
        .count();
    debug_assert_eq!(satisfied_count, flow);
    MonroeAssignment {
        mapping,
        satisfied_count,
    }
}
