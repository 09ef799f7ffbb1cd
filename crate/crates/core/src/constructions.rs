//! Worst-case profile families and the efficiency counterexamples.
//!
//! Each family comes with the ratio its source argument claims for a subject
//! rule (or a witness committee). Candidate and voter indices follow the
//! order in which the argument introduces them.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::exact::Enumerator;
use crate::guarantees::{lambert_w, Optima};
use crate::model::{rational, ApprovalProfile, Committee, Rational};
use crate::rules::{format_rational, rational_to_f64, Rule, RuleId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// CC-ratio of AV tends to `1/k`.
    CcOfAv,
    /// AV-ratio of CC tends to `1/k`.
    AvOfCc,
    /// AV-ratio of a lower-quota rule is at most `2/⌊√k⌋ − 1/k`.
    LqAv,
    /// CC-ratio of a lower-quota committee is `3k/(4k−2)`.
    LqCc,
    /// AV-ratio of (Greedy) Monroe tends to `1/k`.
    MonroeAv,
    /// CC-ratio of Monroe, claimed `(k+1)/(2k−2)`.
    MonroeCc,
    /// CC-ratio of PAV is `2k/(4k−2)`.
    PavCcUpper,
    /// AV-ratio of p-geometric is at most `1/k + 2W(k log p)/(k log p)`.
    PgeomAvUpper,
    /// CC-ratio of p-geometric is `p/(p + 1)` for even k.
    PgeomCcUpper,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::CcOfAv,
        Family::AvOfCc,
        Family::LqAv,
        Family::LqCc,
        Family::MonroeAv,
        Family::MonroeCc,
        Family::PavCcUpper,
        Family::PgeomAvUpper,
        Family::PgeomCcUpper,
    ];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::CcOfAv => "cc-of-av",
            Family::AvOfCc => "av-of-cc",
            Family::LqAv => "lq-av",
            Family::LqCc => "lq-cc",
            Family::MonroeAv => "monroe-av",
            Family::MonroeCc => "monroe-cc",
            Family::PavCcUpper => "pav-cc-upper",
            Family::PgeomAvUpper => "pgeom-av-upper",
            Family::PgeomCcUpper => "pgeom-cc-upper",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Family::ALL
            .into_iter()
            .find(|f| f.to_string() == key)
            .ok_or_else(|| Error::parameter(format!("unknown construction family '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    AvRatio,
    CcRatio,
}

/// What the claimed ratio is measured on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subject {
    /// Minimum over the rule's winners.
    Rule(Rule),
    /// A fixed committee.
    Committee(Committee),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExpectedRatio {
    Exact(Rational),
    /// Only an upper bound is claimed.
    AtMost(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionSpec {
    pub family: Family,
    pub k: usize,
    pub x: usize,
    pub p: Option<Rational>,
    pub target: Target,
    pub subject: Subject,
    pub expected: ExpectedRatio,
    /// The committee the argument names as the bad outcome, when it names one.
    pub named_committee: Option<Committee>,
}

fn require(ok: bool, msg: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::parameter(msg))
    }
}

fn ratio_of(num: usize, den: usize) -> Rational {
    rational(num as i64, den as i64)
}

fn range(start: usize, len: usize) -> Vec<usize> {
    (start..start + len).collect()
}

/// Profile of family `family` at committee size `k` and scale `x`, with its
/// claimed ratio. `p` is required by the geometric families.
pub fn gen(family: Family, k: usize, x: usize, p: Option<&Rational>) -> Result<(ApprovalProfile, ConstructionSpec)> {
    require(k >= 1, "k must be at least 1")?;
    require(x >= 1, "x must be at least 1")?;
    let mut named = None;
    let (m, ballots, target, subject, expected): (usize, Vec<Vec<usize>>, Target, Subject, ExpectedRatio) = match family {
        Family::CcOfAv => {
            // group i approves candidates ik..ik+k-1; the first group has one extra voter
            let mut ballots = Vec::new();
            for i in 0..k {
                let size = if i == 0 { x + 1 } else { x };
                ballots.extend(std::iter::repeat_n(range(i * k, k), size));
            }
            named = Some(Committee::from_indices(0..k)?);
            (
                k * k,
                ballots,
                Target::CcRatio,
                Subject::Rule(Rule::Optimal(RuleId::Av)),
                ExpectedRatio::Exact(ratio_of(x + 1, k * x + 1)),
            )
        }
        Family::AvOfCc => {
            require(x >= 2, "av-of-cc needs x >= 2")?;
            let mut ballots = vec![range(0, k); x];
            for i in 0..k {
                ballots.push(vec![k + i]);
            }
            (
                2 * k,
                ballots,
                Target::AvRatio,
                Subject::Rule(Rule::Optimal(RuleId::Cc)),
                ExpectedRatio::Exact(ratio_of(x + k - 1, x * k)),
            )
        }
        Family::LqAv => {
            // x_1..x_k are 0..k, y_i is candidate k + i for groups i ≥ s
            let s = isqrt(k);
            let mut ballots = Vec::new();
            for i in 0..k {
                let ballot = if i < s { range(0, k) } else { vec![k + i - s] };
                ballots.extend(std::iter::repeat_n(ballot, x));
            }
            let quota_committee: Vec<usize> = (0..s).chain(k..2 * k - s).collect();
            named = Some(Committee::from_indices(quota_committee)?);
            (
                2 * k - s,
                ballots,
                Target::AvRatio,
                Subject::Rule(Rule::Optimal(RuleId::Pav)),
                ExpectedRatio::Exact(ratio_of(k - s + s * s, s * k)),
            )
        }
        Family::LqCc => {
            require(k.is_multiple_of(2), "lq-cc needs an even k")?;
            let mut ballots = vec![range(0, k); k * x];
            for i in 0..k {
                ballots.extend(std::iter::repeat_n(vec![k + i], x));
            }
            let witness: Vec<usize> = (0..k / 2).chain(k..k + k / 2).collect();
            let witness = Committee::from_indices(witness)?;
            named = Some(witness.clone());
            (
                2 * k,
                ballots,
                Target::CcRatio,
                Subject::Committee(witness),
                ExpectedRatio::Exact(ratio_of(3 * k, 4 * k - 2)),
            )
        }
        Family::MonroeAv => {
            require(k >= 2, "monroe-av needs k >= 2")?;
            // c_i = i, the AV-optimal committee is k..2k
            let mut ballots = Vec::new();
            for i in 0..k {
                let mut with_w = range(k, k);
                with_w.insert(0, i);
                ballots.extend(std::iter::repeat_n(with_w, x));
                ballots.push(vec![i]);
            }
            named = Some(Committee::from_indices(0..k)?);
            (
                2 * k,
                ballots,
                Target::AvRatio,
                Subject::Rule(Rule::GreedyMonroe),
                ExpectedRatio::Exact(ratio_of(x + 1, x * k)),
            )
        }
        Family::MonroeCc => {
            require(k >= 2, "monroe-cc needs k >= 2")?;
            // group i (0..2k) approves c_i; the first k groups also approve c_2k
            let mut ballots = Vec::new();
            for i in 0..2 * k {
                let ballot = if i < k { vec![i, 2 * k] } else { vec![i] };
                ballots.extend(std::iter::repeat_n(ballot, x));
            }
            let listed: Vec<usize> = (0..k - 2).chain([k, 2 * k]).collect();
            named = Some(Committee::from_indices(listed)?);
            (
                2 * k + 1,
                ballots,
                Target::CcRatio,
                Subject::Rule(Rule::Optimal(RuleId::Monroe)),
                ExpectedRatio::Exact(ratio_of(k + 1, 2 * k - 2)),
            )
        }
        Family::PavCcUpper => {
            // here x is the number of voters
            require(x.is_multiple_of(2 * k), format!("pav-cc-upper needs 2k = {} to divide n = {x}", 2 * k))?;
            let mut ballots = vec![range(0, k); x / 2];
            for i in 0..k {
                ballots.extend(std::iter::repeat_n(vec![k + i], x / (2 * k)));
            }
            named = Some(Committee::from_indices(0..k)?);
            (
                2 * k,
                ballots,
                Target::CcRatio,
                Subject::Rule(Rule::Optimal(RuleId::Pav)),
                ExpectedRatio::Exact(ratio_of(2 * k, 4 * k - 2)),
            )
        }
        Family::PgeomAvUpper => {
            let p = p.ok_or_else(|| Error::parameter("pgeom-av-upper needs p"))?;
            require(*p > Rational::one(), "pgeom-av-upper needs p > 1")?;
            let kl = k as f64 * rational_to_f64(p).ln();
            let z = kl / lambert_w(kl)?;
            let block = (x as f64 * z).floor() as usize;
            let mut ballots = vec![range(0, k); block];
            for i in 0..k {
                ballots.extend(std::iter::repeat_n(vec![k + i], x));
            }
            (
                2 * k,
                ballots,
                Target::AvRatio,
                Subject::Rule(Rule::Optimal(RuleId::Geometric(p.clone()))),
                ExpectedRatio::AtMost((1.0 / k as f64 + 2.0 / z).min(1.0)),
            )
        }
        Family::PgeomCcUpper => {
            let p = p.ok_or_else(|| Error::parameter("pgeom-cc-upper needs p"))?;
            require(*p >= Rational::one(), "pgeom-cc-upper needs p >= 1")?;
            let px = p * Rational::from_integer(BigInt::from(x));
            require(px.is_integer(), format!("pgeom-cc-upper needs p*x integer, got {}", format_rational(&px)))?;
            let px = px.to_integer().to_usize().ok_or_else(|| Error::parameter("p*x too large"))?;
            let half = k / 2;
            let pairs = if k.is_multiple_of(2) { half } else { half + 1 };
            let mut ballots = Vec::new();
            for i in 0..pairs {
                ballots.extend(std::iter::repeat_n(vec![2 * i, 2 * i + 1], px));
            }
            for i in 0..half {
                ballots.extend(std::iter::repeat_n(vec![2 * pairs + i], x));
            }
            let expected = ratio_of(pairs * px, pairs * px + half * x);
            (
                2 * pairs + half,
                ballots,
                Target::CcRatio,
                Subject::Rule(Rule::Optimal(RuleId::Geometric(p.clone()))),
                ExpectedRatio::Exact(expected),
            )
        }
    };
    let profile = ApprovalProfile::new(m, ballots)?;
    let spec = ConstructionSpec {
        family,
        k,
        x,
        p: p.cloned(),
        target,
        subject,
        expected,
        named_committee: named,
    };
    Ok((profile, spec))
}

fn isqrt(k: usize) -> usize {
    let mut s = (k as f64).sqrt() as usize;
    while s * s > k {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= k {
        s += 1;
    }
    s
}

/// The ratio the construction's target takes on its subject.
pub fn evaluate(profile: &ApprovalProfile, spec: &ConstructionSpec, enumerator: &Enumerator) -> Result<Rational> {
    let optima = Optima::compute(profile, spec.k, enumerator)?;
    let committees = match &spec.subject {
        Subject::Rule(rule) => enumerator.committees(rule, profile, spec.k)?,
        Subject::Committee(w) => vec![w.clone()],
    };
    match spec.target {
        Target::AvRatio => optima.av_ratio(profile, &committees),
        Target::CcRatio => optima.cc_ratio(profile, &committees),
    }
}

/// A counterexample profile for efficiency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EfficiencyFixture {
    pub profile: ApprovalProfile,
    pub k: usize,
    pub bad: Committee,
    pub dominator: Committee,
}

/// The three efficiency counterexamples. Approver sets are listed with
/// 1-based voters as they are usually printed.
pub fn efficiency_fixture(which: usize) -> Result<EfficiencyFixture> {
    let span = |a: usize, b: usize| (a..=b).collect::<Vec<usize>>();
    let (n, k, sets): (usize, usize, Vec<Vec<usize>>) = match which {
        1 => (
            36,
            3,
            vec![
                span(1, 20),
                span(11, 28),
                [span(1, 10), span(29, 36)].concat(),
                span(21, 36),
                span(1, 19),
            ],
        ),
        2 => (24, 2, vec![span(3, 22), vec![1, 2, 23, 24], span(2, 12), span(13, 23)]),
        3 => (
            20,
            2,
            vec![span(2, 10), span(11, 19), span(6, 15), [span(2, 4), span(16, 19)].concat()],
        ),
        other => return Err(Error::parameter(format!("no efficiency fixture {other}; expected 1, 2 or 3"))),
    };
    let profile = ApprovalProfile::from_approver_sets(n, sets.into_iter().map(|s| s.into_iter().map(|v| v - 1)))?;
    let (bad, dominator) = match which {
        1 => (Committee::from_indices([0, 3, 4])?, Committee::from_indices([0, 1, 2])?),
        _ => (Committee::from_indices([2, 3])?, Committee::from_indices([0, 1])?),
    };
    Ok(EfficiencyFixture {
        profile,
        k,
        bad,
        dominator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::{is_party_list, lower_quota_holds};
    use crate::exact::winners;
    use crate::scoring::{av_score, cc_score};
    use crate::sequential::greedy_monroe;

    fn run(family: Family, k: usize, x: usize, p: Option<Rational>) -> (ApprovalProfile, ConstructionSpec, Rational) {
        let (profile, spec) = gen(family, k, x, p.as_ref()).unwrap();
        let value = evaluate(&profile, &spec, &Enumerator::default()).unwrap();
        (profile, spec, value)
    }

    #[test]
    fn families_with_exact_claims() {
        let cases: Vec<(Family, usize, usize, Option<Rational>)> = vec![
            (Family::CcOfAv, 3, 100, None),
            (Family::AvOfCc, 3, 50, None),
            (Family::LqAv, 4, 5, None),
            (Family::LqAv, 5, 3, None),
            (Family::LqCc, 4, 3, None),
            (Family::MonroeAv, 3, 5, None),
            (Family::PavCcUpper, 4, 80, None),
            (Family::PgeomCcUpper, 4, 10, Some(rational(2, 1))),
            (Family::PgeomCcUpper, 3, 4, Some(rational(3, 2))),
        ];
        for (family, k, x, p) in cases {
            let (_, spec, value) = run(family, k, x, p);
            assert_eq!(spec.expected, ExpectedRatio::Exact(value.clone()), "{family} k={k} x={x}: got {value}");
        }
    }

    #[test]
    fn reference_values() {
        assert_eq!(run(Family::CcOfAv, 3, 100, None).2, rational(101, 301));
        assert_eq!(run(Family::AvOfCc, 3, 50, None).2, rational(52, 150));
        assert_eq!(run(Family::PavCcUpper, 4, 80, None).2, rational(8, 14));
        assert_eq!(run(Family::PgeomCcUpper, 4, 10, Some(rational(2, 1))).2, rational(2, 3));
    }

    #[test]
    fn monroe_av_scores() {
        let (p, spec) = gen(Family::MonroeAv, 3, 5, None).unwrap();
        let (w, _) = greedy_monroe(&p, 3).unwrap();
        assert_eq!(Some(&w), spec.named_committee.as_ref());
        assert_eq!(av_score(&p, &w).unwrap(), rational(18, 1));
        let av = winners(&RuleId::Av, &p, 3).unwrap();
        assert_eq!(av.optimum, rational(45, 1));
        assert_eq!(winners(&RuleId::Monroe, &p, 3).unwrap().winners, vec![w]);
    }

    #[test]
    fn monroe_cc_named_committee_is_a_winner() {
        let (p, spec) = gen(Family::MonroeCc, 5, 2, None).unwrap();
        let named = spec.named_committee.unwrap();
        let monroe = winners(&RuleId::Monroe, &p, 5).unwrap();
        assert!(monroe.winners.contains(&named));
        // n = 20: the named committee covers n(k+1)/(2k), the best cover is n(2k-1)/(2k)
        assert_eq!(cc_score(&p, &named).unwrap(), rational(12, 1));
        assert_eq!(winners(&RuleId::Cc, &p, 5).unwrap().optimum, rational(18, 1));
    }

    #[test]
    fn pgeom_av_upper_stays_below_claim() {
        for (k, p) in [(4usize, rational(2, 1)), (3, rational(3, 1))] {
            let (_, spec, value) = run(Family::PgeomAvUpper, k, 200, Some(p));
            match spec.expected {
                ExpectedRatio::AtMost(bound) => assert!(rational_to_f64(&value) <= bound + 1e-9),
                other => panic!("unexpected claim {other:?}"),
            }
        }
    }

    #[test]
    fn lower_quota_families_are_party_lists() {
        let (p, spec) = gen(Family::LqAv, 5, 4, None).unwrap();
        assert!(is_party_list(&p));
        let named = spec.named_committee.unwrap();
        assert!(lower_quota_holds(&p, 5, &named).unwrap());
        let (q, _) = gen(Family::LqCc, 4, 2, None).unwrap();
        assert!(is_party_list(&q));
        let (r, _) = gen(Family::CcOfAv, 3, 4, None).unwrap();
        assert!(is_party_list(&r));
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(gen(Family::PavCcUpper, 4, 81, None), Err(Error::Parameter(_))));
        assert!(matches!(gen(Family::LqCc, 3, 2, None), Err(Error::Parameter(_))));
        assert!(matches!(gen(Family::PgeomCcUpper, 4, 3, Some(&rational(3, 2))), Err(Error::Parameter(_))));
        assert!(matches!(gen(Family::PgeomAvUpper, 4, 3, None), Err(Error::Parameter(_))));
        assert!(matches!(gen(Family::CcOfAv, 0, 3, None), Err(Error::Parameter(_))));
        assert!(efficiency_fixture(4).is_err());
        assert!("nope".parse::<Family>().is_err());
        assert_eq!("PAV_CC_UPPER".parse::<Family>().unwrap(), Family::PavCcUpper);
    }

    #[test]
    fn fixture_shapes() {
        let one = efficiency_fixture(1).unwrap();
        assert_eq!((one.profile.num_voters(), one.profile.num_candidates(), one.k), (36, 5, 3));
        let two = efficiency_fixture(2).unwrap();
        assert_eq!((two.profile.num_voters(), two.profile.num_candidates()), (24, 4));
        let three = efficiency_fixture(3).unwrap();
        assert_eq!((three.profile.num_voters(), three.profile.num_candidates()), (20, 4));
        assert!(three.profile.ballot(crate::model::VoterId(0)).is_empty());
    }
}
