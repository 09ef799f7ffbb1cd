//! The AV-/CC-ratio experiment: generate or ingest profiles, keep those where
//! AV and CC disagree enough, and report both ratios for every rule.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::exact::Enumerator;
use crate::guarantees::Optima;
use crate::harness::config::{Dataset, ExperimentConfig};
use crate::harness::preflib::{parse_preflib, top_i_approvals};
use crate::harness::uniform::uniform_dataset;
use crate::model::{ApprovalProfile, Rational};
use crate::par::{map_indexed, Execution};
use crate::rules::{rational_to_f64, Rule, RuleId};

pub const CSV_HEADER: &str = "instance,rule,k,av_ratio_exact,av_ratio,cc_ratio_exact,cc_ratio";
pub const SUMMARY_HEADER: &str = "rule,k,metric,count,min,q1,median,q3,max";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentRow {
    pub instance: String,
    pub rule: Rule,
    pub k: usize,
    pub av_ratio: Rational,
    pub cc_ratio: Rational,
}

impl ExperimentRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.instance,
            self.rule,
            self.k,
            exact(&self.av_ratio),
            decimal(&self.av_ratio, 12),
            exact(&self.cc_ratio),
            decimal(&self.cc_ratio, 12)
        )
    }
}

fn exact(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `r` rounded half away from zero to `places` decimals, by integer arithmetic.
pub fn decimal(r: &Rational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let (q, rem) = (r.numer().abs() * &scale).div_rem(r.denom());
    let rounded = if rem * 2 >= *r.denom() { q + 1 } else { q };
    let (int, frac) = rounded.div_rem(&scale);
    let sign = if r.is_negative() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{int}");
    }
    format!("{sign}{int}.{frac:0>width$}", width = places as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    AvRatio,
    CcRatio,
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Metric::AvRatio => "av_ratio",
            Metric::CcRatio => "cc_ratio",
        })
    }
}

/// Five-number summary of one metric for one rule and committee size.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub rule: Rule,
    pub k: usize,
    pub metric: Metric,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub rows: Vec<ExperimentRow>,
    pub summary: Vec<SummaryRow>,
    pub instances: usize,
    pub kept: usize,
    pub skipped: usize,
}

impl ExperimentResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv_line());
            out.push('\n');
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from(SUMMARY_HEADER);
        out.push('\n');
        for s in &self.summary {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.12},{:.12},{:.12},{:.12},{:.12}",
                s.rule, s.k, s.metric, s.count, s.min, s.q1, s.median, s.q3, s.max
            );
        }
        out
    }

    pub fn median(&self, rule: &Rule, k: usize, metric: Metric) -> Option<f64> {
        self.summary
            .iter()
            .find(|s| &s.rule == rule && s.k == k && s.metric == metric)
            .map(|s| s.median)
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Quartiles per (rule, k, metric) with linear interpolation, in first-seen order.
pub fn summarize(rows: &[ExperimentRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(Rule, usize)> = Vec::new();
    for row in rows {
        if !keys.iter().any(|(r, k)| r == &row.rule && *k == row.k) {
            keys.push((row.rule.clone(), row.k));
        }
    }
    let mut out = Vec::new();
    for (rule, k) in keys {
        for metric in [Metric::AvRatio, Metric::CcRatio] {
            let mut values: Vec<f64> = rows
                .iter()
                .filter(|r| r.rule == rule && r.k == k)
                .map(|r| match metric {
                    Metric::AvRatio => rational_to_f64(&r.av_ratio),
                    Metric::CcRatio => rational_to_f64(&r.cc_ratio),
                })
                .collect();
            values.sort_by(f64::total_cmp);
            out.push(SummaryRow {
                rule: rule.clone(),
                k,
                metric,
                count: values.len(),
                min: values[0],
                q1: quantile(&values, 0.25),
                median: quantile(&values, 0.5),
                q3: quantile(&values, 0.75),
                max: values[values.len() - 1],
            });
        }
    }
    out
}

fn compromise_with(profile: &ApprovalProfile, optima: &Optima, threshold: &Rational, enumerator: &Enumerator) -> Result<bool> {
    let cc_winners = enumerator.winners(&RuleId::Cc, profile, optima.k)?.winners;
    let av_winners = enumerator.winners(&RuleId::Av, profile, optima.k)?.winners;
    Ok(optima.av_ratio(profile, &cc_winners)? <= *threshold && optima.cc_ratio(profile, &av_winners)? <= *threshold)
}

/// Whether AV and CC are far enough apart: the AV-ratio of CC and the CC-ratio
/// of AV are both at most `threshold`. Degenerate profiles are rejected.
pub fn compromise_filter(profile: &ApprovalProfile, k: usize, threshold: &Rational, enumerator: &Enumerator) -> Result<bool> {
    let optima = Optima::compute(profile, k, enumerator)?;
    match compromise_with(profile, &optima, threshold, enumerator) {
        Err(Error::Degenerate(reason)) => {
            log::info!("filtered degenerate profile: {reason}");
            Ok(false)
        }
        other => other,
    }
}

struct Instance {
    id: String,
    profile: ApprovalProfile,
    k: usize,
}

enum Outcome {
    Kept(Vec<ExperimentRow>),
    Filtered,
    Skipped,
}

fn instances(config: &ExperimentConfig) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    match &config.dataset {
        Dataset::Uniform { profiles, params } => {
            let data = uniform_dataset(config.seed, *profiles, params)?;
            for (j, profile) in data.into_iter().enumerate() {
                for &k in &config.ks {
                    out.push(Instance {
                        id: format!("uniform-{j:04}"),
                        profile: profile.clone(),
                        k,
                    });
                }
            }
        }
        Dataset::Preflib { paths } => {
            for path in paths {
                let election = parse_preflib(&std::fs::read_to_string(path)?)?;
                let name = Path::new(path)
                    .file_name()
                    .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
                for &k in &config.ks {
                    for i in 1..k {
                        out.push(Instance {
                            id: format!("{name}:k{k}:top{i}"),
                            profile: top_i_approvals(&election, i)?,
                            k,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

fn process(instance: &Instance, config: &ExperimentConfig, enumerator: &Enumerator) -> Result<Outcome> {
    let (profile, k) = (&instance.profile, instance.k);
    let optima = Optima::compute(profile, k, enumerator)?;
    match compromise_with(profile, &optima, &config.threshold, enumerator) {
        Ok(true) => {}
        Ok(false) => return Ok(Outcome::Filtered),
        Err(Error::Degenerate(reason)) => {
            log::info!("{}: filtered, {reason}", instance.id);
            return Ok(Outcome::Filtered);
        }
        Err(e) => return Err(e),
    }
    let mut rows = Vec::with_capacity(config.rules.len());
    for rule in &config.rules {
        let winners = enumerator.committees(rule, profile, k)?;
        let report = optima.report(profile, rule, &winners)?;
        rows.push(ExperimentRow {
            instance: instance.id.clone(),
            rule: rule.clone(),
            k,
            av_ratio: report.av_ratio,
            cc_ratio: report.cc_ratio,
        });
    }
    Ok(Outcome::Kept(rows))
}

/// Runs the experiment and writes the configured output files.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let enumerator = Enumerator::new(config.budget, Execution::default());
    let work = instances(config)?;
    let outcomes = map_indexed(work.len(), Execution::default(), |i| {
        let instance = &work[i];
        match process(instance, config, &enumerator) {
            Ok(outcome) => outcome,
            Err(e) => {
                log::warn!("{} (k = {}): skipped, {e}", instance.id, instance.k);
                Outcome::Skipped
            }
        }
    });
    let mut rows = Vec::new();
    let (mut kept, mut skipped) = (0, 0);
    for outcome in outcomes {
        match outcome {
            Outcome::Kept(r) => {
                kept += 1;
                rows.extend(r);
            }
            Outcome::Filtered => {}
            Outcome::Skipped => skipped += 1,
        }
    }
    log::info!("kept {kept} of {} instances, skipped {skipped}", work.len());
    let result = ExperimentResult {
        summary: summarize(&rows),
        rows,
        instances: work.len(),
        kept,
        skipped,
    };
    if let Some(path) = &config.output {
        std::fs::write(path, result.to_csv())?;
    }
    if let Some(path) = &config.summary {
        std::fs::write(path, result.summary_csv())?;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{gen, Family};
    use crate::harness::uniform::UniformParams;
    use crate::model::rational;

    #[test]
    fn decimals() {
        assert_eq!(decimal(&rational(1, 3), 12), "0.333333333333");
        assert_eq!(decimal(&rational(2, 3), 12), "0.666666666667");
        assert_eq!(decimal(&rational(1, 1), 12), "1.000000000000");
        assert_eq!(decimal(&rational(-1, 8), 2), "-0.13");
        assert_eq!(decimal(&rational(101, 301), 4), "0.3355");
    }

    #[test]
    fn quartiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.25), 1.75);
        assert_eq!(quantile(&[5.0], 0.75), 5.0);
    }

    #[test]
    fn filter_cases() {
        let e = Enumerator::default();
        let nine_tenths = rational(9, 10);
        // one committee is optimal for both
        let p = ApprovalProfile::new(3, vec![vec![0], vec![1], vec![2]]).unwrap();
        assert!(!compromise_filter(&p, 2, &nine_tenths, &e).unwrap());
        // AV takes {0,1}: cc-ratio 4/7; CC winners reach av-ratio 7/8
        let mut ballots = vec![vec![0, 1]; 4];
        ballots.extend(vec![vec![2]; 3]);
        ballots.extend(vec![vec![3]; 3]);
        let q = ApprovalProfile::new(4, ballots).unwrap();
        assert!(compromise_filter(&q, 2, &nine_tenths, &e).unwrap());
        assert!(!compromise_filter(&q, 2, &rational(4, 5), &e).unwrap());
        // CC winners of this construction stay close to the AV optimum
        let (r, _) = gen(Family::CcOfAv, 3, 100, None).unwrap();
        assert!(!compromise_filter(&r, 3, &nine_tenths, &e).unwrap());
        let empty = ApprovalProfile::new(3, vec![Vec::<usize>::new()]).unwrap();
        assert!(!compromise_filter(&empty, 1, &rational(1, 1), &e).unwrap());
        // threshold 1 keeps everything non-degenerate
        assert!(compromise_filter(&p, 2, &rational(1, 1), &e).unwrap());
    }

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            dataset: Dataset::Uniform {
                profiles: 12,
                params: UniformParams {
                    m: 8,
                    n: 15,
                    min_size: 1,
                    max_size: 3,
                },
            },
            ks: vec![3],
            rules: vec![Rule::Optimal(RuleId::Av), "seq-phragmen".parse().unwrap()],
            seed: 5,
            threshold: rational(1, 1),
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn av_rows_have_unit_av_ratio() {
        let result = run_experiment(&small_config()).unwrap();
        assert_eq!(result.instances, 12);
        assert!(result.kept > 0);
        for row in result.rows.iter().filter(|r| r.rule == Rule::Optimal(RuleId::Av)) {
            assert_eq!(row.av_ratio, rational(1, 1));
        }
        let csv = result.to_csv();
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 1 + result.rows.len());
        assert_eq!(result.summary.len(), 4);
    }

    #[test]
    fn reruns_are_byte_identical() {
        let a = run_experiment(&small_config()).unwrap();
        let b = run_experiment(&small_config()).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.summary_csv(), b.summary_csv());
    }

    #[test]
    fn budget_overrun_skips_instances() {
        let config = ExperimentConfig {
            budget: 10,
            ..small_config()
        };
        let result = run_experiment(&config).unwrap();
        assert_eq!(result.skipped, 12);
        assert!(result.rows.is_empty());
    }
}
