//! Native profile format: a `m n` header, then one line per voter with
//! space-separated 0-based candidate indices. A blank line is an empty ballot.

use std::path::Path;

use crate::error::{Error, Result};
use crate::model::ApprovalProfile;

pub fn read_profile(text: &str) -> Result<ApprovalProfile> {
    let lines: Vec<&str> = text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).collect();
    let header: Vec<&str> = lines.first().map(|l| l.split_whitespace().collect()).unwrap_or_default();
    if header.len() != 2 {
        return Err(Error::parse(1, "expected header 'm n'"));
    }
    let m: usize = header[0].parse().map_err(|_| Error::parse(1, "invalid candidate count"))?;
    let n: usize = header[1].parse().map_err(|_| Error::parse(1, "invalid voter count"))?;
    if lines.len() < n + 1 {
        return Err(Error::parse(lines.len(), format!("expected {n} ballot lines")));
    }
    if let Some(extra) = lines[n + 1..].iter().position(|l| !l.trim().is_empty()) {
        return Err(Error::parse(n + 2 + extra, format!("more than {n} ballot lines")));
    }
    let mut ballots = Vec::with_capacity(n);
    for (i, line) in lines[1..=n].iter().enumerate() {
        let ballot = line
            .split_whitespace()
            .map(|t| {
                let c: usize = t
                    .parse()
                    .map_err(|_| Error::parse(i + 2, format!("invalid candidate '{t}'")))?;
                if c >= m {
                    return Err(Error::parse(i + 2, format!("candidate {c} out of range (m = {m})")));
                }
                Ok(c)
            })
            .collect::<Result<Vec<usize>>>()?;
        ballots.push(ballot);
    }
    ApprovalProfile::new(m, ballots)
}

pub fn write_profile(profile: &ApprovalProfile) -> String {
    let mut out = format!("{} {}\n", profile.num_candidates(), profile.num_voters());
    for ballot in profile.ballot_lists() {
        let line: Vec<String> = ballot.iter().map(|c| c.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn load_profile(path: &Path) -> Result<ApprovalProfile> {
    read_profile(&std::fs::read_to_string(path)?)
}
