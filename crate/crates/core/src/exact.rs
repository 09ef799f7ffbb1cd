//! Optimal rules by exhaustive enumeration of all size-k committees.
//!
//! The committee range `0..C(m,k)` is cut into fixed-size rank chunks; each
//! chunk is unranked once and walked with the lexicographic successor, and
//! per-chunk optima are merged in chunk order, so results are identical with
//! and without parallelism.

use std::cmp::{Ordering, Reverse};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::model::{binomial, integer, next_combination, unrank, ApprovalProfile, Bitset, CandidateId, Committee, Rational};
use crate::par::{map_indexed, Execution};
use crate::rules::{Rule, RuleId, ThieleRule};
use crate::scoring::{monroe_satisfied, monroe_score, MonroeAssignment, ThieleWeights};
use crate::sequential::{greedy_monroe, seq_phragmen, seq_thiele, LoadVector};

/// Committees enumerated per work item.
const CHUNK: u128 = 2048;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Environment variable overriding the enumeration budget.
pub const BUDGET_ENV: &str = "ABC_ENUM_BUDGET";

/// Winner set of an optimal rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleOutcome {
    /// All optimal committees, lexicographic.
    pub winners: Vec<Committee>,
    /// Optimal score, or the minimal maximum load for optimal Phragmén.
    pub optimum: Rational,
    /// Witness for the first winner.
    pub trace: Option<Trace>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Trace {
    Monroe(MonroeAssignment),
    Loads(LoadVector),
}

/// Maximum voter load of an optimal Phragmén distribution; `Infinite` when a
/// member has no approvers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Load {
    Finite(Rational),
    Infinite,
}

/// Enumeration settings shared by every exhaustive computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Enumerator {
    pub budget: u64,
    pub execution: Execution,
}

impl Default for Enumerator {
    fn default() -> Self {
        Enumerator {
            budget: budget_from_env(),
            execution: Execution::default(),
        }
    }
}

/// Budget from [`BUDGET_ENV`], or [`DEFAULT_BUDGET`] when unset or invalid.
pub fn budget_from_env() -> u64 {
    match std::env::var(BUDGET_ENV) {
        Ok(text) => text.trim().parse().unwrap_or_else(|_| {
            log::warn!("ignoring invalid {BUDGET_ENV}={text}");
            DEFAULT_BUDGET
        }),
        Err(_) => DEFAULT_BUDGET,
    }
}

impl Enumerator {
    pub fn new(budget: u64, execution: Execution) -> Self {
        Enumerator { budget, execution }
    }

    pub fn sequential() -> Self {
        Enumerator {
            execution: Execution::Sequential,
            ..Enumerator::default()
        }
    }

    /// Fails unless `1 ≤ k ≤ m` and `C(m,k)` fits the budget.
    pub fn check(&self, m: usize, k: usize) -> Result<u128> {
        if k == 0 || k > m {
            return Err(Error::domain(format!("committee size {k} must lie in 1..={m}")));
        }
        let committees = binomial(m, k);
        if committees > self.budget as u128 {
            return Err(Error::Budget {
                m,
                k,
                committees,
                budget: self.budget,
            });
        }
        Ok(committees)
    }

    /// All committees maximising `value`, with the maximum.
    pub fn argmax<V, F>(&self, m: usize, k: usize, value: F) -> Result<(V, Vec<Committee>)>
    where
        V: Ord + Send,
        F: Fn(&[usize], &Bitset) -> V + Sync + Send,
    {
        let total = self.check(m, k)?;
        let chunks = total.div_ceil(CHUNK) as usize;
        let parts = map_indexed(chunks, self.execution, |chunk| {
            let start = chunk as u128 * CHUNK;
            let len = CHUNK.min(total - start);
            let mut combo = unrank(m, k, start).expect("rank in range");
            let mut best: Option<V> = None;
            let mut ties: Vec<Vec<usize>> = Vec::new();
            for step in 0..len {
                if step > 0 {
                    next_combination(&mut combo, m);
                }
                let set = Bitset::from_indices(m, combo.iter().copied());
                let v = value(&combo, &set);
                let order = match &best {
                    None => Ordering::Greater,
                    Some(b) => v.cmp(b),
                };
                match order {
                    Ordering::Greater => {
                        best = Some(v);
                        ties.clear();
                        ties.push(combo.clone());
                    }
                    Ordering::Equal => ties.push(combo.clone()),
                    Ordering::Less => {}
                }
            }
            (best.expect("nonempty chunk"), ties)
        });
        let mut best: Option<V> = None;
        let mut winners: Vec<Vec<usize>> = Vec::new();
        for (v, ties) in parts {
            let order = match &best {
                None => Ordering::Greater,
                Some(b) => v.cmp(b),
            };
            match order {
                Ordering::Greater => {
                    best = Some(v);
                    winners = ties;
                }
                Ordering::Equal => winners.extend(ties),
                Ordering::Less => {}
            }
        }
        let committees = winners
            .into_iter()
            .map(|combo| Committee::from_sorted(combo.into_iter().map(CandidateId).collect()))
            .collect();
        Ok((best.expect("at least one committee"), committees))
    }

    /// Optimal Thiele score and all maximisers.
    pub fn thiele(&self, rule: &ThieleRule, profile: &ApprovalProfile, k: usize) -> Result<(Rational, Vec<Committee>)> {
        self.check(profile.num_candidates(), k)?;
        let weights = ThieleWeights::new(rule, k, profile.num_voters())?;
        match weights.scaled() {
            Some(table) => {
                let (best, winners) = self.argmax(profile.num_candidates(), k, |_, set| {
                    weights.scaled_score(table, profile, set)
                })?;
                Ok((Rational::new(BigInt::from(best), table.denom.clone()), winners))
            }
            None => self.argmax(profile.num_candidates(), k, |_, set| weights.score_set(profile, set)),
        }
    }

    /// Winners of an optimal rule.
    pub fn winners(&self, rule: &RuleId, profile: &ApprovalProfile, k: usize) -> Result<RuleOutcome> {
        if let Some(thiele) = rule.thiele() {
            let (optimum, winners) = self.thiele(&thiele, profile, k)?;
            return Ok(RuleOutcome {
                winners,
                optimum,
                trace: None,
            });
        }
        match rule {
            RuleId::Monroe => {
                let (best, winners) = self.argmax(profile.num_candidates(), k, |combo, _| {
                    let members: Vec<CandidateId> = combo.iter().copied().map(CandidateId).collect();
                    monroe_satisfied(profile, &members)
                })?;
                let (_, witness) = monroe_score(profile, &winners[0])?;
                Ok(RuleOutcome {
                    winners,
                    optimum: integer(best as u128),
                    trace: Some(Trace::Monroe(witness)),
                })
            }
            RuleId::OptPhragmen => self.opt_phragmen(profile, k),
            _ => unreachable!("thiele rules handled above"),
        }
    }

    /// Committees minimising the optimal Phragmén load.
    pub fn opt_phragmen(&self, profile: &ApprovalProfile, k: usize) -> Result<RuleOutcome> {
        let (best, winners) = self.argmax(profile.num_candidates(), k, |combo, _| {
            Reverse(subset_load(profile, combo))
        })?;
        match best.0 {
            Load::Infinite => Err(Error::Infeasible(
                "every committee contains a candidate without approvers".into(),
            )),
            Load::Finite(optimum) => {
                let loads = load_distribution(profile, &winners[0], &optimum);
                Ok(RuleOutcome {
                    winners,
                    optimum,
                    trace: Some(Trace::Loads(loads)),
                })
            }
        }
    }

    /// Committees chosen by any rule: the full tie set for optimal rules, the
    /// single outcome for sequential ones.
    pub fn committees(&self, rule: &Rule, profile: &ApprovalProfile, k: usize) -> Result<Vec<Committee>> {
        match rule {
            Rule::Optimal(id) => Ok(self.winners(id, profile, k)?.winners),
            Rule::Sequential(thiele) => Ok(vec![seq_thiele(thiele, profile, k)?.0]),
            Rule::GreedyMonroe => Ok(vec![greedy_monroe(profile, k)?.0]),
            Rule::SeqPhragmen => Ok(vec![seq_phragmen(profile, k)?.0]),
        }
    }
}

/// Winners of an optimal rule with the default enumerator.
pub fn winners(rule: &RuleId, profile: &ApprovalProfile, k: usize) -> Result<RuleOutcome> {
    Enumerator::default().winners(rule, profile, k)
}

/// Optimal Phragmén winners with the default enumerator.
pub fn opt_phragmen_winners(profile: &ApprovalProfile, k: usize) -> Result<RuleOutcome> {
    Enumerator::default().opt_phragmen(profile, k)
}

/// `max_{∅≠W'⊆W} |W'| / |N(W')|`, the smallest achievable maximum voter load
/// when every member of `W` spreads one unit over its approvers.
pub fn optimal_phragmen_load(profile: &ApprovalProfile, w: &Committee) -> Result<Rational> {
    profile.check_committee(w)?;
    if w.size() == 0 {
        return Err(Error::domain("optimal Phragmén load needs a nonempty committee"));
    }
    let indices: Vec<usize> = w.indices().collect();
    match subset_load(profile, &indices) {
        Load::Finite(load) => Ok(load),
        Load::Infinite => Err(Error::Infeasible(format!("a member of {w} has no approvers"))),
    }
}

fn subset_load(profile: &ApprovalProfile, members: &[usize]) -> Load {
    if members.iter().any(|&c| profile.approval_count(CandidateId(c)) == 0) {
        return Load::Infinite;
    }
    let k = members.len();
    assert!(k < 64, "subset enumeration limited to 63 members");
    // best as (size, covered) compared by cross multiplication
    let mut best = (0usize, 1usize);
    let mut union = Bitset::new(profile.num_voters());
    for mask in 1u64..(1u64 << k) {
        union.clear();
        for (bit, &c) in members.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                union.union_with(profile.approver_set(CandidateId(c)));
            }
        }
        let size = mask.count_ones() as usize;
        let covered = union.count();
        if size * best.1 > best.0 * covered {
            best = (size, covered);
        }
    }
    Load::Finite(Rational::new(BigInt::from(best.0), BigInt::from(best.1)))
}

/// A load distribution attaining `max_load` for committee `w`.
///
/// With `max_load = a/b`, each member sends `b` units to its approvers and
/// each voter accepts at most `a`; a saturating flow divided by `b` is the
/// distribution.
pub fn load_distribution(profile: &ApprovalProfile, w: &Committee, max_load: &Rational) -> LoadVector {
    let n = profile.num_voters();
    let a = max_load.numer().to_i64().expect("load numerator fits i64");
    let b = max_load.denom().to_i64().expect("load denominator fits i64");
    let (source, sink) = (0, 1);
    let mut net = FlowNetwork::new(2 + w.size() + n);
    let voter_node = |v: usize| 2 + w.size() + v;
    let mut arcs = Vec::new();
    for (pos, c) in w.members().iter().enumerate() {
        net.add_arc(source, 2 + pos, b);
        for v in profile.approver_set(*c).iter() {
            arcs.push((v, net.add_arc(2 + pos, voter_node(v), b)));
        }
    }
    for v in 0..n {
        net.add_arc(voter_node(v), sink, a);
    }
    let flow = net.max_flow(source, sink);
    debug_assert_eq!(flow, b * w.size() as i64);
    let mut received = vec![0i64; n];
    for (v, arc) in arcs {
        received[v] += net.flow(arc);
    }
    LoadVector {
        loads: received
            .into_iter()
            .map(|r| Rational::new(BigInt::from(r), BigInt::from(b)))
            .collect(),
        round: w.size(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::efficiency_fixture;
    use crate::model::rational;
    use crate::scoring::{monroe_score, thiele_score};
    use proptest::prelude::*;

    fn c(ix: &[usize]) -> Committee {
        Committee::from_indices(ix.iter().copied()).unwrap()
    }

    fn example_one() -> ApprovalProfile {
        let mut ballots = Vec::new();
        ballots.extend(std::iter::repeat_n(vec![0, 1, 2], 30));
        ballots.extend(std::iter::repeat_n(vec![3, 4, 5], 20));
        ballots.extend(std::iter::repeat_n(vec![6, 7, 8], 5));
        ApprovalProfile::new(9, ballots).unwrap()
    }

    #[test]
    fn example_one_av_and_cc() {
        let p = example_one();
        let av = winners(&RuleId::Av, &p, 3).unwrap();
        assert_eq!(av.winners, vec![c(&[0, 1, 2])]);
        assert_eq!(av.optimum, rational(90, 1));
        let cc = winners(&RuleId::Cc, &p, 3).unwrap();
        assert!(cc.winners.contains(&c(&[0, 3, 6])));
        assert_eq!(cc.winners.len(), 27);
        assert_eq!(cc.optimum, rational(55, 1));
    }

    #[test]
    fn full_committee_is_only_winner() {
        let p = example_one();
        for rule in [RuleId::Av, RuleId::Cc, RuleId::Pav, RuleId::Monroe, RuleId::OptPhragmen] {
            assert_eq!(winners(&rule, &p, 9).unwrap().winners, vec![c(&[0, 1, 2, 3, 4, 5, 6, 7, 8])]);
        }
    }

    #[test]
    fn size_and_budget_errors() {
        let p = example_one();
        assert!(matches!(winners(&RuleId::Av, &p, 10), Err(Error::Domain(_))));
        assert!(matches!(winners(&RuleId::Av, &p, 0), Err(Error::Domain(_))));
        let tight = Enumerator::new(10, Execution::Sequential);
        match tight.winners(&RuleId::Av, &p, 3) {
            Err(Error::Budget { committees, .. }) => assert_eq!(committees, 84),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn second_fixture_monroe_and_phragmen() {
        let fx = efficiency_fixture(2).unwrap();
        let monroe = winners(&RuleId::Monroe, &fx.profile, 2).unwrap();
        assert_eq!(monroe.winners, vec![c(&[2, 3])]);
        assert_eq!(monroe.optimum, rational(22, 1));
        let opt = opt_phragmen_winners(&fx.profile, 2).unwrap();
        assert_eq!(opt.winners, vec![c(&[2, 3])]);
        assert_eq!(opt.optimum, rational(1, 11));
        assert_eq!(optimal_phragmen_load(&fx.profile, &c(&[2, 3])).unwrap(), rational(1, 11));
        assert_eq!(optimal_phragmen_load(&fx.profile, &c(&[0, 1])).unwrap(), rational(1, 4));
        match opt.trace {
            Some(Trace::Loads(loads)) => {
                assert_eq!(loads.total(), rational(2, 1));
                assert_eq!(loads.max(), rational(1, 11));
            }
            other => panic!("missing load trace: {other:?}"),
        }
    }

    #[test]
    fn phragmen_load_of_single_member() {
        let p = ApprovalProfile::new(2, vec![vec![0], vec![0], vec![0, 1]]).unwrap();
        assert_eq!(optimal_phragmen_load(&p, &c(&[0])).unwrap(), rational(1, 3));
        let q = ApprovalProfile::new(2, vec![vec![0]]).unwrap();
        assert!(matches!(optimal_phragmen_load(&q, &c(&[1])), Err(Error::Infeasible(_))));
        assert!(matches!(opt_phragmen_winners(&q, 2), Err(Error::Infeasible(_))));
    }

    #[test]
    fn opt_phragmen_prefers_large_parties() {
        let mut ballots = vec![vec![0]; 5];
        ballots.extend(vec![vec![1]; 2]);
        ballots.extend(vec![vec![2]; 4]);
        let p = ApprovalProfile::new(3, ballots).unwrap();
        assert_eq!(opt_phragmen_winners(&p, 2).unwrap().winners, vec![c(&[0, 2])]);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let p = example_one();
        for k in 1..=4 {
            let a = Enumerator::new(DEFAULT_BUDGET, Execution::Sequential).winners(&RuleId::Cc, &p, k).unwrap();
            let b = Enumerator::new(DEFAULT_BUDGET, Execution::Parallel).winners(&RuleId::Cc, &p, k).unwrap();
            assert_eq!(a, b);
        }
    }

    /// Smallest `L` in the candidate set `{a/b}` for which a flow with every
    /// voter capped at `L` absorbs all `k` units.
    fn binary_search_load(p: &ApprovalProfile, w: &Committee) -> Rational {
        let k = w.size() as i64;
        let n = p.num_voters() as i64;
        let mut candidates: Vec<Rational> = (1..=k).flat_map(|a| (1..=n).map(move |b| rational(a, b))).collect();
        candidates.sort();
        candidates.dedup();
        let feasible = |l: &Rational| {
            let (a, b) = (l.numer().to_i64().unwrap(), l.denom().to_i64().unwrap());
            let mut net = FlowNetwork::new(2 + w.size() + p.num_voters());
            for (pos, m) in w.members().iter().enumerate() {
                net.add_arc(0, 2 + pos, b);
                for v in p.approver_set(*m).iter() {
                    net.add_arc(2 + pos, 2 + w.size() + v, b);
                }
            }
            for v in 0..p.num_voters() {
                net.add_arc(2 + w.size() + v, 1, a);
            }
            net.max_flow(0, 1) == b * k
        };
        let (mut lo, mut hi) = (0usize, candidates.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if feasible(&candidates[mid]) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        candidates[lo].clone()
    }

    fn arb_instance() -> impl Strategy<Value = (ApprovalProfile, Committee)> {
        (2usize..=6, 1usize..=8)
            .prop_flat_map(|(m, n)| {
                (
                    proptest::collection::vec(proptest::collection::vec(0..m, 0..=m), n),
                    proptest::sample::subsequence((0..m).collect::<Vec<_>>(), 1..=m.min(4)),
                    Just(m),
                )
            })
            .prop_map(|(ballots, members, m)| {
                let mut ballots = ballots;
                // every member gets an approver
                for (i, &c) in members.iter().enumerate() {
                    let v = i % ballots.len();
                    ballots[v].push(c);
                }
                (ApprovalProfile::new(m, ballots).unwrap(), Committee::from_indices(members).unwrap())
            })
    }

    fn arb_profile() -> impl Strategy<Value = ApprovalProfile> {
        (2usize..=6, 1usize..=7).prop_flat_map(|(m, n)| {
            proptest::collection::vec(proptest::collection::vec(0..m, 0..=m), n)
                .prop_map(move |b| ApprovalProfile::new(m, b).unwrap())
        })
    }

    proptest! {
        #[test]
        fn subset_formula_matches_flow_search((p, w) in arb_instance()) {
            prop_assert_eq!(optimal_phragmen_load(&p, &w).unwrap(), binary_search_load(&p, &w));
            let load = optimal_phragmen_load(&p, &w).unwrap();
            let dist = load_distribution(&p, &w, &load);
            prop_assert_eq!(dist.total(), integer(w.size() as u128));
            prop_assert!(dist.max() <= load);
        }

        #[test]
        fn winners_attain_optimum(p in arb_profile(), k in 1usize..=3) {
            let k = k.min(p.num_candidates());
            for rule in [RuleId::Av, RuleId::Cc, RuleId::Pav, RuleId::Geometric(rational(2, 1))] {
                let out = winners(&rule, &p, k).unwrap();
                let thiele = rule.thiele().unwrap();
                for w in &out.winners {
                    prop_assert_eq!(&thiele_score(&thiele, &p, w).unwrap(), &out.optimum);
                }
                for w in crate::model::all_committees(p.num_candidates(), k).unwrap() {
                    prop_assert!(thiele_score(&thiele, &p, &w).unwrap() <= out.optimum);
                }
            }
            let monroe = winners(&RuleId::Monroe, &p, k).unwrap();
            for w in &monroe.winners {
                prop_assert_eq!(&monroe_score(&p, w).unwrap().0, &monroe.optimum);
            }
            prop_assert_eq!(
                winners(&RuleId::Geometric(rational(1, 1)), &p, k).unwrap().winners,
                winners(&RuleId::Av, &p, k).unwrap().winners
            );
        }

        #[test]
        fn symmetric_candidates_tie(p in arb_profile(), k in 1usize..=3) {
            // append a clone of candidate 0
            let m = p.num_candidates();
            let ballots: Vec<Vec<usize>> = p.ballot_lists().into_iter().map(|mut b| {
                if b.contains(&0) { b.push(m); }
                b
            }).collect();
            let q = ApprovalProfile::new(m + 1, ballots).unwrap();
            let k = k.min(m);
            let swap = |w: &Committee| Committee::from_indices(w.indices().map(|c| match c {
                0 => m,
                x if x == m => 0,
                x => x,
            })).unwrap();
            for rule in [RuleId::Pav, RuleId::Cc, RuleId::Monroe] {
                let out = winners(&rule, &q, k).unwrap();
                for w in &out.winners {
                    prop_assert!(out.winners.contains(&swap(w)));
                }
            }
        }
    }
}
