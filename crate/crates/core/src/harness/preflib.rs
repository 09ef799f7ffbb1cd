//! PrefLib strict-order election files (`.soc` / `.soi` and the legacy layout).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{ApprovalProfile, CandidateId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedBallot {
    pub multiplicity: usize,
    /// Strict, possibly incomplete ranking, best first.
    pub ranking: Vec<CandidateId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreflibElection {
    pub num_candidates: usize,
    pub ballots: Vec<RankedBallot>,
}

impl PreflibElection {
    pub fn num_voters(&self) -> usize {
        self.ballots.iter().map(|b| b.multiplicity).sum()
    }
}

fn parse_count(text: &str, line: usize, what: &str) -> Result<usize> {
    text.trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} '{}'", text.trim())))
}

fn parse_ranking(text: &str, line: usize) -> Result<Vec<usize>> {
    if text.contains('{') {
        return Err(Error::Unsupported {
            line,
            message: "tied ranks are not supported".into(),
        });
    }
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let mut seen = Vec::new();
    for token in text.split(',') {
        let c = parse_count(token, line, "candidate")?;
        if c == 0 {
            return Err(Error::parse(line, "candidate indices are 1-based"));
        }
        if seen.contains(&(c - 1)) {
            return Err(Error::parse(line, format!("candidate {c} ranked twice")));
        }
        seen.push(c - 1);
    }
    Ok(seen)
}

/// Parses a PrefLib election with strict orders.
///
/// Modern files carry `#` metadata and `multiplicity: a,b,c` ballot lines.
/// Legacy files start with the candidate count, one `index,name` line per
/// candidate and a `voters,sum,unique` line, then `multiplicity,a,b,c`.
pub fn parse_preflib(text: &str) -> Result<PreflibElection> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut declared: Option<usize> = None;
    let mut body = Vec::new();
    for &(no, l) in &lines {
        if let Some(meta) = l.strip_prefix('#') {
            if let Some((key, value)) = meta.split_once(':') {
                if key.trim().eq_ignore_ascii_case("NUMBER ALTERNATIVES") {
                    declared = Some(parse_count(value, no, "candidate count")?);
                }
            }
        } else {
            body.push((no, l));
        }
    }

    let legacy = body
        .first()
        .is_some_and(|(_, l)| !l.contains(':') && !l.contains(',') && l.parse::<usize>().is_ok());
    let mut raw: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    if legacy {
        let (no, first) = body[0];
        let m = parse_count(first, no, "candidate count")?;
        declared = Some(m);
        if body.len() < m + 2 {
            return Err(Error::parse(no, "legacy header is truncated"));
        }
        for &(no, l) in &body[1..=m] {
            if !l.contains(',') {
                return Err(Error::parse(no, "expected 'index,name' candidate line"));
            }
        }
        let (no, summary) = body[m + 1];
        if summary.split(',').count() != 3 || summary.split(',').any(|t| t.trim().parse::<usize>().is_err()) {
            return Err(Error::parse(no, "expected 'voters,sum,unique' summary line"));
        }
        for &(no, l) in &body[m + 2..] {
            let (mult, rest) = l.split_once(',').unwrap_or((l, ""));
            raw.push((no, parse_count(mult, no, "multiplicity")?, parse_ranking(rest, no)?));
        }
    } else {
        for &(no, l) in &body {
            let (mult, rest) = l
                .split_once(':')
                .ok_or_else(|| Error::parse(no, format!("expected 'multiplicity: ranking', got '{l}'")))?;
            raw.push((no, parse_count(mult, no, "multiplicity")?, parse_ranking(rest, no)?));
        }
    }
    if raw.is_empty() {
        return Err(Error::parse(lines.last().map_or(0, |(n, _)| *n), "no ballots"));
    }
    let largest = raw.iter().flat_map(|(_, _, r)| r.iter().copied()).max().map_or(0, |c| c + 1);
    let m = declared.unwrap_or(largest).max(1);
    let mut ballots = Vec::with_capacity(raw.len());
    for (no, multiplicity, ranking) in raw {
        if multiplicity == 0 {
            return Err(Error::parse(no, "multiplicity must be positive"));
        }
        if let Some(c) = ranking.iter().find(|&&c| c >= m) {
            return Err(Error::parse(no, format!("candidate {} exceeds the {m} alternatives", c + 1)));
        }
        ballots.push(RankedBallot {
            multiplicity,
            ranking: ranking.into_iter().map(CandidateId).collect(),
        });
    }
    Ok(PreflibElection {
        num_candidates: m,
        ballots,
    })
}

/// Writes the modern layout accepted by [`parse_preflib`].
pub fn serialize_preflib(election: &PreflibElection) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# NUMBER ALTERNATIVES: {}", election.num_candidates);
    let _ = writeln!(out, "# NUMBER VOTERS: {}", election.num_voters());
    for b in &election.ballots {
        let ranking: Vec<String> = b.ranking.iter().map(|c| (c.0 + 1).to_string()).collect();
        let _ = writeln!(out, "{}: {}", b.multiplicity, ranking.join(","));
    }
    out
}

/// Every voter approves her top `min(i, length)` candidates.
pub fn top_i_approvals(election: &PreflibElection, i: usize) -> Result<ApprovalProfile> {
    if i == 0 {
        return Err(Error::parameter("top-i approval needs i >= 1"));
    }
    let mut ballots = Vec::with_capacity(election.num_voters());
    for b in &election.ballots {
        let top: Vec<usize> = b.ranking.iter().take(i).map(|c| c.0).collect();
        ballots.extend(std::iter::repeat_n(top, b.multiplicity));
    }
    ApprovalProfile::new(election.num_candidates, ballots)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MODERN: &str = "# FILE NAME: 00001-00000001.soi\n# NUMBER ALTERNATIVES: 4\n# NUMBER VOTERS: 6\n3: 2,1,4\n2: 1,3\n1: 4\n";

    #[test]
    fn modern_file() {
        let e = parse_preflib(MODERN).unwrap();
        assert_eq!(e.num_candidates, 4);
        assert_eq!(e.ballots[0].multiplicity, 3);
        assert_eq!(e.ballots[0].ranking, vec![CandidateId(1), CandidateId(0), CandidateId(3)]);
        assert_eq!(e.num_voters(), 6);
    }

    #[test]
    fn legacy_file() {
        let text = "3\n1,Alice\n2,Bob\n3,Carol\n5,5,2\n4,1,2,3\n1,3\n";
        let e = parse_preflib(text).unwrap();
        assert_eq!(e.num_candidates, 3);
        assert_eq!(e.ballots.len(), 2);
        assert_eq!(e.ballots[1].ranking, vec![CandidateId(2)]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_preflib("# NUMBER ALTERNATIVES: 3\n1: 1,2\n2: {1,2},3\n") {
            Err(Error::Unsupported { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse_preflib("1: 1,2\nbroken\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_preflib("# only\n# comments\n") {
            Err(Error::Parse { message, .. }) => assert_eq!(message, "no ballots"),
            other => panic!("{other:?}"),
        }
        assert!(parse_preflib("# NUMBER ALTERNATIVES: 2\n1: 1,3\n").is_err());
        assert!(parse_preflib("1: 1,1\n").is_err());
        assert!(parse_preflib("0: 1\n").is_err());
    }

    #[test]
    fn round_trip() {
        let e = parse_preflib(MODERN).unwrap();
        assert_eq!(parse_preflib(&serialize_preflib(&e)).unwrap(), e);
    }

    #[test]
    fn top_i() {
        let e = parse_preflib("# NUMBER ALTERNATIVES: 3\n2: 1,2,3\n1: 3\n").unwrap();
        let p = top_i_approvals(&e, 2).unwrap();
        assert_eq!(p.num_voters(), 3);
        assert_eq!(p.ballot_lists(), vec![vec![0, 1], vec![0, 1], vec![2]]);
        let all = top_i_approvals(&e, 10).unwrap();
        assert_eq!(all.ballot_lists()[0], vec![0, 1, 2]);
        assert!(top_i_approvals(&e, 0).is_err());
    }
}
