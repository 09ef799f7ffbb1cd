//! Experiment configuration: flat `key = value` lines, `#` starts a comment.
//!
//! ```text
//! dataset = uniform        # or preflib
//! paths = a.soi, b.soc     # preflib only
//! ks = 3-7                 # list and ranges: 3,5 or 3-7
//! rules = av, cc, pav, seq-phragmen
//! seed = 42
//! threshold = 0.9
//! profiles = 500           # uniform only
//! m = 20
//! n = 50
//! min_size = 2
//! max_size = 5
//! budget = 10000000
//! output = rows.csv
//! summary = summary.csv
//! ```

use std::path::{Path, PathBuf};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::budget_from_env;
use crate::harness::uniform::UniformParams;
use crate::model::Rational;
use crate::rules::{parse_rational, Rule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dataset {
    Uniform { profiles: usize, params: UniformParams },
    Preflib { paths: Vec<PathBuf> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub dataset: Dataset,
    pub ks: Vec<usize>,
    pub rules: Vec<Rule>,
    pub seed: u64,
    /// Keep a profile only if both compromise ratios are at most this.
    pub threshold: Rational,
    pub budget: u64,
    pub output: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: Dataset::Uniform {
                profiles: 500,
                params: UniformParams::default(),
            },
            ks: vec![5],
            rules: Rule::experiment_defaults(),
            seed: 0,
            threshold: Rational::new(9.into(), 10.into()),
            budget: budget_from_env(),
            output: None,
            summary: None,
        }
    }
}

fn parse_ks(value: &str, line: usize) -> Result<Vec<usize>> {
    let mut ks = Vec::new();
    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || Error::parse(line, format!("invalid committee size '{part}'"));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                ks.extend(a..=b);
            }
            None => ks.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(ks)
}

impl ExperimentConfig {
    /// Parses a config; relative paths are resolved against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut config = ExperimentConfig::default();
        let mut dataset = "uniform".to_string();
        let mut paths: Vec<PathBuf> = Vec::new();
        let (mut profiles, mut params) = (500usize, UniformParams::default());
        let resolve = |p: &str| match base {
            Some(dir) if Path::new(p).is_relative() => dir.join(p),
            _ => PathBuf::from(p),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::parse(line, format!("expected 'key = value', got '{content}'")))?;
            let (key, value) = (key.trim().to_ascii_lowercase(), value.trim());
            let number = |what: &str| -> Result<usize> {
                value.parse().map_err(|_| Error::parse(line, format!("invalid {what} '{value}'")))
            };
            match key.as_str() {
                "dataset" => dataset = value.to_ascii_lowercase(),
                "paths" => {
                    paths = value
                        .split(',')
                        .map(str::trim)
                        .filter(|p| !p.is_empty())
                        .map(resolve)
                        .collect()
                }
                "ks" | "k" => config.ks = parse_ks(value, line)?,
                "rules" => {
                    config.rules = value
                        .split(',')
                        .map(str::trim)
                        .filter(|r| !r.is_empty())
                        .map(str::parse)
                        .collect::<Result<Vec<Rule>>>()?
                }
                "seed" => {
                    config.seed = value
                        .parse()
                        .map_err(|_| Error::parse(line, format!("invalid seed '{value}'")))?
                }
                "threshold" => config.threshold = parse_rational(value)?,
                "profiles" => profiles = number("profile count")?,
                "m" => params.m = number("candidate count")?,
                "n" => params.n = number("voter count")?,
                "min_size" => params.min_size = number("ballot size")?,
                "max_size" => params.max_size = number("ballot size")?,
                "budget" => config.budget = number("budget")? as u64,
                "output" => config.output = Some(resolve(value)),
                "summary" => config.summary = Some(resolve(value)),
                other => return Err(Error::parse(line, format!("unknown key '{other}'"))),
            }
        }
        config.dataset = match dataset.as_str() {
            "uniform" => Dataset::Uniform { profiles, params },
            "preflib" => Dataset::Preflib { paths },
            other => return Err(Error::parameter(format!("unknown dataset '{other}'"))),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent())
    }

    pub fn validate(&self) -> Result<()> {
        if self.ks.is_empty() || self.ks.contains(&0) {
            return Err(Error::parameter("ks must be a nonempty list of positive sizes"));
        }
        if self.rules.is_empty() {
            return Err(Error::parameter("no rules configured"));
        }
        if self.threshold <= Rational::zero() || self.threshold > Rational::one() {
            return Err(Error::parameter("threshold must lie in (0, 1]"));
        }
        if let Dataset::Preflib { paths } = &self.dataset {
            if paths.is_empty() {
                return Err(Error::parameter("the preflib dataset needs paths"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rational;

    #[test]
    fn full_config() {
        let text = "# uniform run\ndataset = uniform\nks = 3-5, 7\nrules = av, seq-phragmen, geom-1.5\nseed = 9\nthreshold = 0.8\nprofiles = 10\nm = 8\nn = 12\nbudget = 1000\noutput = out.csv # rows\n";
        let c = ExperimentConfig::parse(text, Some(Path::new("/tmp/x"))).unwrap();
        assert_eq!(c.ks, vec![3, 4, 5, 7]);
        assert_eq!(c.rules.len(), 3);
        assert_eq!(c.seed, 9);
        assert_eq!(c.threshold, rational(4, 5));
        assert_eq!(c.budget, 1000);
        assert_eq!(c.output, Some(PathBuf::from("/tmp/x/out.csv")));
        match c.dataset {
            Dataset::Uniform { profiles, params } => {
                assert_eq!((profiles, params.m, params.n, params.min_size), (10, 8, 12, 2));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn defaults_follow_the_uniform_protocol() {
        let c = ExperimentConfig::parse("", None).unwrap();
        assert_eq!(c.ks, vec![5]);
        assert_eq!(c.rules, Rule::experiment_defaults());
        assert_eq!(c.threshold, rational(9, 10));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(ExperimentConfig::parse("bogus = 1", None), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(ExperimentConfig::parse("\nks", None), Err(Error::Parse { line: 2, .. })));
        assert!(ExperimentConfig::parse("threshold = 1.5", None).is_err());
        assert!(ExperimentConfig::parse("dataset = preflib", None).is_err());
        assert!(ExperimentConfig::parse("ks = 5-3", None).is_err());
        assert!(ExperimentConfig::parse("rules = borda", None).is_err());
    }
}
