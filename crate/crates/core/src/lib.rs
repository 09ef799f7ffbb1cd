//! Exact engine for approval-based committee (ABC) voting rules.
//!
//! Every score, load and ratio is an exact rational number. Optimal rules are
//! computed by exhaustive committee enumeration (parallelised with rayon when
//! the `parallel` feature is enabled), sequential rules follow their greedy
//! definitions with lexicographic tie-breaking.
//!
//! Module map:
//! - [`model`]: candidates, voters, approval profiles, committees, rationals
//! - [`scoring`]: AV, CC, PAV, p-geometric and Monroe scores
//! - [`exact`]: optimal rules by enumeration, including optimal Phragmén
//! - [`sequential`]: seq-Thiele rules, Greedy Monroe and seq-Phragmén
//! - [`guarantees`]: worst-case bound formulas, Lambert W, AV-/CC-ratios
//! - [`axioms`]: efficiency (domination) and lower quota
//! - [`constructions`]: worst-case profile families and counterexample fixtures
//! - [`harness`]: PrefLib ingestion, synthetic data, experiments, file formats

pub mod axioms;
pub mod constructions;
mod error;
pub mod exact;
pub mod flow;
pub mod guarantees;
pub mod harness;
pub mod model;
mod par;
pub mod rules;
pub mod scoring;
pub mod sequential;

pub use error::{Error, Result};
pub use model::{
    all_committees, ApprovalProfile, Bitset, CandidateId, Committee, Rational, VoterId,
};
pub use par::Execution;
pub use rules::{Rule, RuleId, ThieleRule};
