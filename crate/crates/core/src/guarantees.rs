//! Worst-case guarantee formulas, the Lambert W function and per-instance
//! AV-/CC-ratios.
//!
//! Bounds are floating point because they involve `W`, `log` and `√`; ratios
//! are exact.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::Enumerator;
use crate::model::{ApprovalProfile, CandidateId, Committee, Rational};
use crate::rules::{rational_to_f64, Rule, RuleId, ThieleRule};
use crate::scoring::{av_score, cc_score};

/// Principal branch of the Lambert W function for `z ≥ 0`.
pub fn lambert_w(z: f64) -> Result<f64> {
    if z.is_nan() || z < 0.0 {
        return Err(Error::domain(format!("lambert_w needs z >= 0, got {z}")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut w = z.ln_1p();
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - z;
        let fp = ew * (w + 1.0);
        let step = f / (fp - (w + 2.0) * f / (2.0 * w + 2.0));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs().max(1.0) {
            break;
        }
    }
    // newton polish, then pick the best of the neighbouring floats
    let ew = w.exp();
    w -= (w * ew - z) / (ew * (w + 1.0));
    let residual = |x: f64| (x * x.exp() - z).abs();
    let candidates = [w, next_toward(w, f64::INFINITY), next_toward(w, 0.0)];
    Ok(candidates
        .into_iter()
        .filter(|x| *x >= 0.0)
        .min_by(|a, b| residual(*a).total_cmp(&residual(*b)))
        .unwrap_or(w))
}

fn next_toward(x: f64, target: f64) -> f64 {
    if x == target || x == 0.0 {
        return x;
    }
    let bits = x.to_bits();
    // x > 0 here
    f64::from_bits(if target > x { bits + 1 } else { bits - 1 })
}

/// Closed interval `[lower, upper] ⊆ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GuaranteeBounds {
    pub lower: f64,
    pub upper: f64,
}

impl GuaranteeBounds {
    fn new(lower: f64, upper: f64) -> Self {
        // k = 1 turns some upper formulas into 1/0
        let clamp = |x: f64| if x.is_nan() || x > 1.0 { 1.0 } else { x.max(0.0) };
        GuaranteeBounds {
            lower: clamp(lower),
            upper: clamp(upper),
        }
    }

    fn exact(value: f64) -> Self {
        Self::new(value, value)
    }
}

/// Rows of the guarantee table. `LowerQuota` covers every rule satisfying
/// lower quota and carries only upper bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundRule {
    Av,
    Cc,
    SeqCc,
    Pav,
    Geometric,
    SeqPav,
    Monroe,
    GreedyMonroe,
    SeqPhragmen,
    LowerQuota,
}

impl BoundRule {
    pub const ALL: [BoundRule; 10] = [
        BoundRule::Av,
        BoundRule::Cc,
        BoundRule::SeqCc,
        BoundRule::Pav,
        BoundRule::Geometric,
        BoundRule::SeqPav,
        BoundRule::Monroe,
        BoundRule::GreedyMonroe,
        BoundRule::SeqPhragmen,
        BoundRule::LowerQuota,
    ];

    /// Row of a runnable rule, with `p` for the geometric row.
    pub fn of(rule: &Rule) -> Result<(BoundRule, Option<f64>)> {
        Ok(match rule {
            Rule::Optimal(RuleId::Av) => (BoundRule::Av, None),
            Rule::Optimal(RuleId::Cc) => (BoundRule::Cc, None),
            Rule::Optimal(RuleId::Pav) => (BoundRule::Pav, None),
            Rule::Optimal(RuleId::Geometric(p)) => (BoundRule::Geometric, Some(rational_to_f64(p))),
            Rule::Optimal(RuleId::Monroe) => (BoundRule::Monroe, None),
            Rule::Sequential(ThieleRule::Cc) => (BoundRule::SeqCc, None),
            Rule::Sequential(ThieleRule::Pav) => (BoundRule::SeqPav, None),
            Rule::GreedyMonroe => (BoundRule::GreedyMonroe, None),
            Rule::SeqPhragmen => (BoundRule::SeqPhragmen, None),
            other => return Err(Error::domain(format!("no guarantee bounds for rule {other}"))),
        })
    }
}

impl fmt::Display for BoundRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundRule::Av => "av",
            BoundRule::Cc => "cc",
            BoundRule::SeqCc => "seq-cc",
            BoundRule::Pav => "pav",
            BoundRule::Geometric => "geom",
            BoundRule::SeqPav => "seq-pav",
            BoundRule::Monroe => "monroe",
            BoundRule::GreedyMonroe => "greedy-monroe",
            BoundRule::SeqPhragmen => "seq-phragmen",
            BoundRule::LowerQuota => "lower-quota",
        })
    }
}

impl FromStr for BoundRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        BoundRule::ALL
            .into_iter()
            .find(|r| r.to_string() == lower)
            .or_else(|| matches!(lower.as_str(), "geometric" | "p-geom").then_some(BoundRule::Geometric))
            .ok_or_else(|| Error::domain(format!("no guarantee bounds for rule '{s}'")))
    }
}

/// `(AV-guarantee, CC-guarantee)` bounds of a rule for committee size `k`.
///
/// Upper bounds above 1 are clamped. The geometric row needs `p ≥ 1`; at
/// `p = 1` the rule is AV and the AV row is returned.
pub fn guarantee_bounds(rule: BoundRule, k: usize, p: Option<f64>) -> Result<(GuaranteeBounds, GuaranteeBounds)> {
    if k == 0 {
        return Err(Error::domain("committee size must be at least 1"));
    }
    let kf = k as f64;
    let sqrt_floor = (k as f64).sqrt().floor();
    let proportional_av_upper = 2.0 / sqrt_floor - 1.0 / kf;
    let half_plus = 0.5 + 1.0 / (4.0 * kf - 2.0);
    let inv_k = GuaranteeBounds::exact(1.0 / kf);
    Ok(match rule {
        BoundRule::Av => (GuaranteeBounds::exact(1.0), inv_k),
        BoundRule::Cc => (inv_k, GuaranteeBounds::exact(1.0)),
        BoundRule::SeqCc => (
            inv_k,
            GuaranteeBounds::new(1.0 - (-1.0f64).exp(), 1.0 - (1.0 - 1.0 / kf).powi(k as i32)),
        ),
        BoundRule::Pav => (
            GuaranteeBounds::new(1.0 / (2.0 + kf.sqrt()), proportional_av_upper),
            GuaranteeBounds::new(0.5, half_plus),
        ),
        BoundRule::Geometric => {
            let p = p.ok_or_else(|| Error::domain("the geometric row needs p"))?;
            if p.is_nan() || p < 1.0 {
                return Err(Error::domain(format!("geometric parameter p = {p} must be at least 1")));
            }
            if p == 1.0 {
                return guarantee_bounds(BoundRule::Av, k, None);
            }
            let x = kf * p.ln();
            let w = lambert_w(x)?;
            (
                GuaranteeBounds::new(w / (x + w), 1.0 / kf + 2.0 * w / x),
                GuaranteeBounds::new((p - 1.0) / p, p / (p + kf / (kf + 2.0))),
            )
        }
        BoundRule::SeqPav => (
            GuaranteeBounds::new(1.0 / (2.0 * kf.sqrt()), proportional_av_upper),
            GuaranteeBounds::new(1.0 / (kf.ln() + 2.0), half_plus),
        ),
        BoundRule::Monroe | BoundRule::GreedyMonroe => {
            (inv_k, GuaranteeBounds::new(0.5, 0.5 + 1.0 / (kf - 1.0)))
        }
        BoundRule::SeqPhragmen => (
            GuaranteeBounds::new(1.0 / (5.0 * kf.sqrt() + 1.0), proportional_av_upper),
            GuaranteeBounds::new(0.5, half_plus),
        ),
        BoundRule::LowerQuota => (
            GuaranteeBounds::new(0.0, proportional_av_upper),
            GuaranteeBounds::new(0.0, 0.75 + 3.0 / (8.0 * kf - 4.0)),
        ),
    })
}

/// Per-instance ratios of one rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioReport {
    pub rule: Rule,
    pub k: usize,
    pub av_ratio: Rational,
    pub cc_ratio: Rational,
}

/// Best AV- and CC-scores over all size-k committees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Optima {
    pub k: usize,
    pub av: Rational,
    pub cc: Rational,
}

impl Optima {
    /// The AV optimum is the sum of the k largest approval counts; the CC
    /// optimum comes from enumeration.
    pub fn compute(profile: &ApprovalProfile, k: usize, enumerator: &Enumerator) -> Result<Self> {
        enumerator.check(profile.num_candidates(), k)?;
        Ok(Optima {
            k,
            av: max_av_score(profile, k),
            cc: enumerator.thiele(&ThieleRule::Cc, profile, k)?.0,
        })
    }

    pub fn av_ratio(&self, profile: &ApprovalProfile, winners: &[Committee]) -> Result<Rational> {
        ratio(profile, self.k, winners, &self.av, "AV", av_score)
    }

    pub fn cc_ratio(&self, profile: &ApprovalProfile, winners: &[Committee]) -> Result<Rational> {
        ratio(profile, self.k, winners, &self.cc, "CC", cc_score)
    }

    pub fn report(&self, profile: &ApprovalProfile, rule: &Rule, winners: &[Committee]) -> Result<RatioReport> {
        Ok(RatioReport {
            rule: rule.clone(),
            k: self.k,
            av_ratio: self.av_ratio(profile, winners)?,
            cc_ratio: self.cc_ratio(profile, winners)?,
        })
    }
}

fn max_av_score(profile: &ApprovalProfile, k: usize) -> Rational {
    let mut counts: Vec<usize> = (0..profile.num_candidates())
        .map(|c| profile.approval_count(CandidateId(c)))
        .collect();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    Rational::from_integer(BigInt::from(counts[..k].iter().sum::<usize>()))
}

fn ratio(
    profile: &ApprovalProfile,
    k: usize,
    winners: &[Committee],
    optimum: &Rational,
    name: &str,
    score: fn(&ApprovalProfile, &Committee) -> Result<Rational>,
) -> Result<Rational> {
    if winners.is_empty() {
        return Err(Error::domain("ratio needs at least one committee"));
    }
    if let Some(w) = winners.iter().find(|w| w.size() != k) {
        return Err(Error::domain(format!("committee {w} does not have size {k}")));
    }
    if optimum.is_zero() {
        return Err(Error::Degenerate(format!("the optimal {name}-score for k = {k} is 0")));
    }
    let mut worst: Option<Rational> = None;
    for w in winners {
        let s = score(profile, w)?;
        if worst.as_ref().is_none_or(|b| s < *b) {
            worst = Some(s);
        }
    }
    Ok(worst.expect("nonempty") / optimum)
}

/// `min_{W ∈ winners} sc_av(W) / max_{|W|=k} sc_av(W)`
pub fn av_ratio(profile: &ApprovalProfile, k: usize, winners: &[Committee]) -> Result<Rational> {
    if k == 0 || k > profile.num_candidates() {
        return Err(Error::domain(format!("committee size {k} must lie in 1..={}", profile.num_candidates())));
    }
    ratio(profile, k, winners, &max_av_score(profile, k), "AV", av_score)
}

/// `min_{W ∈ winners} sc_cc(W) / max_{|W|=k} sc_cc(W)`
pub fn cc_ratio(profile: &ApprovalProfile, k: usize, winners: &[Committee]) -> Result<Rational> {
    let optimum = Enumerator::default().thiele(&ThieleRule::Cc, profile, k)?.0;
    ratio(profile, k, winners, &optimum, "CC", cc_score)
}

/// Runs `rule` and reports both ratios of its winners.
pub fn ratio_report(rule: &Rule, profile: &ApprovalProfile, k: usize, enumerator: &Enumerator) -> Result<RatioReport> {
    let optima = Optima::compute(profile, k, enumerator)?;
    let winners = enumerator.committees(rule, profile, k)?;
    optima.report(profile, rule, &winners)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::winners;
    use crate::model::{all_committees, rational};
    use proptest::prelude::*;

    #[test]
    fn lambert_w_known_values() {
        assert_eq!(lambert_w(0.0).unwrap(), 0.0);
        assert!((lambert_w(std::f64::consts::E).unwrap() - 1.0).abs() <= 1e-12);
        // fixed-point oracle w = e^{-w}
        let mut omega = 0.5f64;
        for _ in 0..200 {
            omega = (-omega).exp();
        }
        assert!((lambert_w(1.0).unwrap() - omega).abs() <= 1e-12);
        assert!((omega - 0.567_143_290_409_783_8).abs() < 1e-15);
        assert!(matches!(lambert_w(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn lambert_w_identity_and_monotone() {
        let mut prev = -1.0;
        for i in 0..=2000 {
            let z = i as f64 * 0.5;
            let w = lambert_w(z).unwrap();
            assert!((w * w.exp() - z).abs() <= 1e-12 * z.max(1.0), "z = {z}");
            assert!(w > prev);
            prev = w;
        }
    }

    #[test]
    fn table_rows() {
        let (av, cc) = guarantee_bounds(BoundRule::Av, 5, None).unwrap();
        assert_eq!((av.lower, av.upper), (1.0, 1.0));
        assert_eq!((cc.lower, cc.upper), (0.2, 0.2));
        let (_, cc) = guarantee_bounds(BoundRule::Pav, 4, None).unwrap();
        assert_eq!(cc.lower, 0.5);
        assert!((cc.upper - (0.5 + 1.0 / 14.0)).abs() < 1e-15);
        let (_, cc) = guarantee_bounds(BoundRule::Geometric, 4, Some(1.0 + 1e-9)).unwrap();
        assert!(cc.lower < 1e-8);
        assert!(guarantee_bounds(BoundRule::Geometric, 4, Some(0.5)).is_err());
        assert!(guarantee_bounds(BoundRule::Geometric, 4, None).is_err());
        assert!("borda".parse::<BoundRule>().is_err());
        assert!(BoundRule::of(&Rule::Optimal(RuleId::OptPhragmen)).is_err());
        let (av, cc) = guarantee_bounds(BoundRule::Monroe, 1, None).unwrap();
        assert_eq!((av.upper, cc.upper), (1.0, 1.0));
    }

    #[test]
    fn bounds_are_ordered() {
        for k in 1..=100 {
            for rule in BoundRule::ALL {
                for p in [1.5, 2.0, 5.0] {
                    let (av, cc) = guarantee_bounds(rule, k, Some(p)).unwrap();
                    for b in [av, cc] {
                        assert!(0.0 <= b.lower && b.lower <= b.upper && b.upper <= 1.0, "{rule} k={k} p={p}: {b:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn construction_ratios() {
        // CC winners on the AV-of-CC construction, k = 3, x = 50
        let (k, x) = (3usize, 50usize);
        let mut ballots = vec![(0..k).collect::<Vec<_>>(); x];
        for i in 0..k {
            ballots.push(vec![k + i]);
        }
        let p = ApprovalProfile::new(2 * k, ballots).unwrap();
        let cc = winners(&RuleId::Cc, &p, k).unwrap().winners;
        assert_eq!(av_ratio(&p, k, &cc).unwrap(), rational(52, 150));
        let av = winners(&RuleId::Av, &p, k).unwrap().winners;
        assert_eq!(av_ratio(&p, k, &av).unwrap(), rational(1, 1));
        assert_eq!(cc_ratio(&p, k, &cc).unwrap(), rational(1, 1));
    }

    #[test]
    fn degenerate_profile() {
        let p = ApprovalProfile::new(3, vec![Vec::<usize>::new(), vec![]]).unwrap();
        let w = vec![Committee::from_indices([0]).unwrap()];
        assert!(matches!(av_ratio(&p, 1, &w), Err(Error::Degenerate(_))));
        assert!(matches!(cc_ratio(&p, 1, &w), Err(Error::Degenerate(_))));
    }

    proptest! {
        #[test]
        fn ratio_over_all_committees_is_worst_over_best(
            ballots in proptest::collection::vec(proptest::collection::vec(0usize..5, 1..=5), 1..=8),
            k in 1usize..=3,
        ) {
            let p = ApprovalProfile::new(5, ballots).unwrap();
            let all: Vec<Committee> = all_committees(5, k).unwrap().collect();
            let scores: Vec<Rational> = all.iter().map(|w| av_score(&p, w).unwrap()).collect();
            let expected = scores.iter().min().unwrap() / scores.iter().max().unwrap();
            prop_assert_eq!(av_ratio(&p, k, &all).unwrap(), expected);
            let covers: Vec<Rational> = all.iter().map(|w| cc_score(&p, w).unwrap()).collect();
            let expected = covers.iter().min().unwrap() / covers.iter().max().unwrap();
            prop_assert_eq!(cc_ratio(&p, k, &all).unwrap(), expected);
        }
    }
}
