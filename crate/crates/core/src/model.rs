//! Election data model: candidates, voters, approval profiles and committees.
//!
//! Candidates and voters are dense 0-based indices. Approval sets are stored
//! as bitsets so that ballot-committee intersections reduce to popcounts.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

/// Exact rational number used for every score, load and ratio.
pub type Rational = BigRational;

pub(crate) fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub(crate) fn integer(value: u128) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidateId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VoterId(pub usize);

impl CandidateId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl VoterId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for VoterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Fixed-capacity bitset over `0..len`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bitset {
    words: Box<[u64]>,
    len: usize,
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Bitset {
            words: vec![0u64; len.div_ceil(64).max(1)].into_boxed_slice(),
            len,
        }
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Bitset::new(len);
        for i in indices {
            set.insert(i);
        }
        set
    }

    /// Capacity (universe size), not the number of elements.
    pub fn universe(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] & (1 << (i % 64)) != 0
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// `|self ∩ other|`
    #[inline]
    pub fn intersection_count(&self, other: &Bitset) -> usize {
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    #[inline]
    pub fn intersects(&self, other: &Bitset) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(a, b)| a & b != 0)
    }

    pub fn union_with(&mut self, other: &Bitset) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
    }

    pub fn difference_with(&mut self, other: &Bitset) {
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a &= !b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + bit)
                }
            })
        })
    }
}

impl fmt::Debug for Bitset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Approval ballots of `n` voters over `m` candidates.
///
/// Immutable after construction. Empty ballots are allowed and contribute
/// nothing to any score.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApprovalProfile {
    num_candidates: usize,
    ballots: Vec<Bitset>,
    approvers: Vec<Bitset>,
    groups: Vec<BallotGroup>,
    group_of: Vec<usize>,
}

/// Voters with identical ballots, collapsed for fast scoring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallotGroup {
    pub ballot: Bitset,
    pub multiplicity: usize,
    /// Lowest voter index holding this ballot.
    pub first_voter: usize,
}

impl ApprovalProfile {
    /// Builds a profile from per-voter lists of approved candidate indices.
    /// Repeated candidates inside one ballot collapse (set semantics).
    pub fn new<B, I>(num_candidates: usize, ballots: B) -> Result<Self>
    where
        B: IntoIterator<Item = I>,
        I: IntoIterator<Item = usize>,
    {
        if num_candidates == 0 {
            return Err(Error::domain("a profile needs at least one candidate"));
        }
        let mut sets = Vec::new();
        for (voter, ballot) in ballots.into_iter().enumerate() {
            let mut set = Bitset::new(num_candidates);
            for c in ballot {
                if c >= num_candidates {
                    return Err(Error::domain(format!(
                        "voter {voter} approves candidate {c}, but there are only {num_candidates} candidates"
                    )));
                }
                set.insert(c);
            }
            sets.push(set);
        }
        Self::from_bitsets(num_candidates, sets)
    }

    pub fn from_bitsets(num_candidates: usize, ballots: Vec<Bitset>) -> Result<Self> {
        if num_candidates == 0 {
            return Err(Error::domain("a profile needs at least one candidate"));
        }
        if ballots.is_empty() {
            return Err(Error::domain("a profile needs at least one voter"));
        }
        if let Some(b) = ballots.iter().find(|b| b.universe() != num_candidates) {
            return Err(Error::domain(format!(
                "ballot over {} candidates in a profile with {num_candidates}",
                b.universe()
            )));
        }
        let n = ballots.len();
        let mut approvers = vec![Bitset::new(n); num_candidates];
        for (v, ballot) in ballots.iter().enumerate() {
            for c in ballot.iter() {
                approvers[c].insert(v);
            }
        }
        let mut groups: Vec<BallotGroup> = Vec::new();
        let mut group_of = Vec::with_capacity(n);
        let mut index: std::collections::HashMap<Bitset, usize> = std::collections::HashMap::new();
        for (v, ballot) in ballots.iter().enumerate() {
            match index.get(ballot) {
                Some(&g) => {
                    groups[g].multiplicity += 1;
                    group_of.push(g);
                }
                None => {
                    index.insert(ballot.clone(), groups.len());
                    group_of.push(groups.len());
                    groups.push(BallotGroup {
                        ballot: ballot.clone(),
                        multiplicity: 1,
                        first_voter: v,
                    });
                }
            }
        }
        Ok(ApprovalProfile {
            num_candidates,
            ballots,
            approvers,
            groups,
            group_of,
        })
    }

    /// Builds a profile from the approver sets `N(c)` of each candidate.
    pub fn from_approver_sets<S>(num_voters: usize, approver_sets: S) -> Result<Self>
    where
        S: IntoIterator,
        S::Item: IntoIterator<Item = usize>,
    {
        let sets: Vec<Vec<usize>> = approver_sets
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect();
        let m = sets.len();
        let mut ballots = vec![Vec::new(); num_voters];
        for (c, voters) in sets.iter().enumerate() {
            for &v in voters {
                if v >= num_voters {
                    return Err(Error::domain(format!(
                        "candidate {c} approved by voter {v}, but there are only {num_voters} voters"
                    )));
                }
                ballots[v].push(c);
            }
        }
        ApprovalProfile::new(m, ballots)
    }

    pub fn num_candidates(&self) -> usize {
        self.num_candidates
    }

    pub fn num_voters(&self) -> usize {
        self.ballots.len()
    }

    pub fn ballot(&self, voter: VoterId) -> &Bitset {
        &self.ballots[voter.0]
    }

    pub fn ballots(&self) -> &[Bitset] {
        &self.ballots
    }

    /// Distinct ballots with multiplicities, in order of first appearance.
    pub fn groups(&self) -> &[BallotGroup] {
        &self.groups
    }

    /// Index into [`groups`](Self::groups) of the voter's ballot.
    pub fn group_of(&self, voter: VoterId) -> usize {
        self.group_of[voter.0]
    }

    /// Voters approving `c` as a bitset over voters.
    pub fn approver_set(&self, c: CandidateId) -> &Bitset {
        &self.approvers[c.0]
    }

    pub fn approval_count(&self, c: CandidateId) -> usize {
        self.approvers[c.0].count()
    }

    pub(crate) fn check_candidate(&self, c: CandidateId) -> Result<()> {
        if c.0 >= self.num_candidates {
            Err(Error::domain(format!(
                "candidate {} out of range (m = {})",
                c.0, self.num_candidates
            )))
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_committee(&self, w: &Committee) -> Result<()> {
        w.members().iter().try_for_each(|&c| self.check_candidate(c))
    }

    /// `N(c)`: the voters approving `c`, ascending.
    pub fn approvers(&self, c: CandidateId) -> Result<Vec<VoterId>> {
        self.check_candidate(c)?;
        Ok(self.approvers[c.0].iter().map(VoterId).collect())
    }

    /// `N(X)`: voters approving at least one member of `candidates`, ascending.
    pub fn covered_voters(&self, candidates: &[CandidateId]) -> Result<Vec<VoterId>> {
        Ok(self.covered_set(candidates)?.iter().map(VoterId).collect())
    }

    pub fn covered_set(&self, candidates: &[CandidateId]) -> Result<Bitset> {
        let mut covered = Bitset::new(self.num_voters());
        for &c in candidates {
            self.check_candidate(c)?;
            covered.union_with(&self.approvers[c.0]);
        }
        Ok(covered)
    }

    /// Ballots as sorted candidate index lists.
    pub fn ballot_lists(&self) -> Vec<Vec<usize>> {
        self.ballots.iter().map(|b| b.iter().collect()).collect()
    }
}

/// A committee: a sorted set of distinct candidates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Committee {
    members: Vec<CandidateId>,
}

impl Committee {
    /// Sorts and validates distinctness.
    pub fn new(members: impl IntoIterator<Item = CandidateId>) -> Result<Self> {
        let mut members: Vec<CandidateId> = members.into_iter().collect();
        members.sort_unstable();
        if members.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("committee members must be distinct"));
        }
        Ok(Committee { members })
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        Committee::new(indices.into_iter().map(CandidateId))
    }

    pub(crate) fn from_sorted(members: Vec<CandidateId>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Committee { members }
    }

    pub fn members(&self) -> &[CandidateId] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, c: CandidateId) -> bool {
        self.members.binary_search(&c).is_ok()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().map(|c| c.0)
    }

    pub fn to_bitset(&self, num_candidates: usize) -> Bitset {
        Bitset::from_indices(num_candidates, self.indices())
    }
}

impl fmt::Display for Committee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, c) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", c.0)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Committee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Committee {
    type Err = Error;

    /// Accepts `0,1,2`, `{0,1,2}` or whitespace separated indices.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('{').trim_end_matches('}');
        let indices = body
            .split(|ch: char| ch == ',' || ch.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::parameter(format!("invalid candidate index '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Committee::from_indices(indices)
    }
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    acc
}

/// Lexicographic k-subsets of `0..m` as index vectors.
#[derive(Clone, Debug)]
pub struct Combinations {
    m: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(m: usize, k: usize) -> Self {
        Combinations {
            m,
            current: (k <= m).then(|| (0..k).collect()),
        }
    }

    /// Starts at the combination of lexicographic rank `rank`.
    pub fn starting_at(m: usize, k: usize, rank: u128) -> Self {
        Combinations {
            m,
            current: unrank(m, k, rank),
        }
    }
}

/// Advances `combo` to its lexicographic successor; false when exhausted.
pub(crate) fn next_combination(combo: &mut [usize], m: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < m - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        self.current = next_combination(&mut next, self.m).then_some(next);
        Some(out)
    }
}

/// The k-subset of `0..m` at lexicographic position `rank`.
pub(crate) fn unrank(m: usize, k: usize, mut rank: u128) -> Option<Vec<usize>> {
    if k > m || rank >= binomial(m, k) {
        return None;
    }
    let mut combo = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let remaining = k - slot - 1;
        loop {
            let block = binomial(m - next - 1, remaining);
            if rank < block {
                break;
            }
            rank -= block;
            next += 1;
        }
        combo.push(next);
        next += 1;
    }
    Some(combo)
}

/// All size-k committees over `m` candidates in lexicographic order.
pub fn all_committees(m: usize, k: usize) -> Result<impl Iterator<Item = Committee>> {
    if k > m {
        return Err(Error::domain(format!(
            "committee size {k} exceeds the number of candidates {m}"
        )));
    }
    Ok(Combinations::new(m, k)
        .map(|combo| Committee::from_sorted(combo.into_iter().map(CandidateId).collect())))
}
