//! Rule identifiers shared by the solvers, the ratio code and the CLI.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{rational, Rational};

/// Thiele rules: score is a sum over voters of a function of `|A(i) ∩ W|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ThieleRule {
    Av,
    Cc,
    Pav,
    /// p-geometric with `p ≥ 1`; weight of the j-th approved member is `p^-j`.
    Geometric(Rational),
}

/// Optimal (irresolute) rules computed by enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RuleId {
    Av,
    Cc,
    Pav,
    Geometric(Rational),
    Monroe,
    OptPhragmen,
}

/// Any rule the engine can run.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Optimal(RuleId),
    Sequential(ThieleRule),
    GreedyMonroe,
    SeqPhragmen,
}

impl ThieleRule {
    pub fn geometric(p: Rational) -> Result<Self> {
        check_p(&p)?;
        Ok(ThieleRule::Geometric(p))
    }
}

impl RuleId {
    pub fn geometric(p: Rational) -> Result<Self> {
        check_p(&p)?;
        Ok(RuleId::Geometric(p))
    }

    /// The Thiele form of this rule, when it has one.
    pub fn thiele(&self) -> Option<ThieleRule> {
        match self {
            RuleId::Av => Some(ThieleRule::Av),
            RuleId::Cc => Some(ThieleRule::Cc),
            RuleId::Pav => Some(ThieleRule::Pav),
            RuleId::Geometric(p) => Some(ThieleRule::Geometric(p.clone())),
            RuleId::Monroe | RuleId::OptPhragmen => None,
        }
    }
}

pub(crate) fn check_p(p: &Rational) -> Result<()> {
    if p < &Rational::one() {
        Err(Error::domain(format!("geometric parameter p = {p} must be at least 1")))
    } else {
        Ok(())
    }
}

/// Parses `2`, `1.5`, `3/2`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::parameter(format!("invalid number '{text}'"));
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac: BigInt = frac.parse().map_err(|_| bad())?;
        let magnitude = int.abs() * &scale + frac;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(numer, scale));
    }
    let n: BigInt = text.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Shortest rendering: integers as `2`, terminating decimals as `1.5`,
/// otherwise `num/den`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    for places in 1..=12usize {
        let scaled = r * Rational::from_integer(BigInt::from(10u32).pow(places as u32));
        if scaled.is_integer() {
            let digits = format!("{:0>width$}", scaled.numer().abs(), width = places + 1);
            let (int, frac) = digits.split_at(digits.len() - places);
            let sign = if r.is_negative() { "-" } else { "" };
            return format!("{sign}{int}.{frac}");
        }
    }
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_p(text: &str) -> Result<Rational> {
    let p = parse_rational(text)?;
    check_p(&p)?;
    Ok(p)
}

impl fmt::Display for ThieleRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThieleRule::Av => f.write_str("av"),
            ThieleRule::Cc => f.write_str("cc"),
            ThieleRule::Pav => f.write_str("pav"),
            ThieleRule::Geometric(p) => write!(f, "geom-{}", format_rational(p)),
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleId::Monroe => f.write_str("monroe"),
            RuleId::OptPhragmen => f.write_str("opt-phragmen"),
            other => write!(f, "{}", other.thiele().expect("thiele rule")),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Optimal(r) => write!(f, "{r}"),
            Rule::Sequential(r) => write!(f, "seq-{r}"),
            Rule::GreedyMonroe => f.write_str("greedy-monroe"),
            Rule::SeqPhragmen => f.write_str("seq-phragmen"),
        }
    }
}

impl FromStr for ThieleRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "av" => Ok(ThieleRule::Av),
            "cc" => Ok(ThieleRule::Cc),
            "pav" => Ok(ThieleRule::Pav),
            _ => {
                if let Some(p) = lower.strip_prefix("geom-") {
                    Ok(ThieleRule::Geometric(parse_p(p)?))
                } else if let Some(p) = lower.strip_suffix("-geom").or_else(|| lower.strip_suffix("-geometric")) {
                    Ok(ThieleRule::Geometric(parse_p(p)?))
                } else {
                    Err(Error::parameter(format!("unknown rule '{s}'")))
                }
            }
        }
    }
}

impl FromStr for RuleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "monroe" => Ok(RuleId::Monroe),
            "opt-phragmen" | "optimal-phragmen" => Ok(RuleId::OptPhragmen),
            other => Ok(match other.parse::<ThieleRule>()? {
                ThieleRule::Av => RuleId::Av,
                ThieleRule::Cc => RuleId::Cc,
                ThieleRule::Pav => RuleId::Pav,
                ThieleRule::Geometric(p) => RuleId::Geometric(p),
            }),
        }
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "greedy-monroe" => Ok(Rule::GreedyMonroe),
            "seq-phragmen" | "phragmen" => Ok(Rule::SeqPhragmen),
            _ => match lower.strip_prefix("seq-") {
                Some(rest) => Ok(Rule::Sequential(rest.parse()?)),
                None => Ok(Rule::Optimal(lower.parse()?)),
            },
        }
    }
}

impl Rule {
    /// The rule list of the uniform/PrefLib experiments.
    pub fn experiment_defaults() -> Vec<Rule> {
        vec![
            Rule::Optimal(RuleId::Av),
            Rule::Optimal(RuleId::Cc),
            Rule::Sequential(ThieleRule::Cc),
            Rule::Optimal(RuleId::Pav),
            Rule::Sequential(ThieleRule::Pav),
            Rule::SeqPhragmen,
            Rule::Optimal(RuleId::Monroe),
            Rule::Optimal(RuleId::Geometric(rational(3, 2))),
            Rule::Optimal(RuleId::Geometric(rational(2, 1))),
            Rule::Optimal(RuleId::Geometric(rational(5, 1))),
        ]
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
