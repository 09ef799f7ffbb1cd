//! Data ingestion, synthetic profiles and the ratio experiment.

mod config;
mod experiment;
mod native;
mod preflib;
mod uniform;

pub use config::{Dataset, ExperimentConfig};
pub use experiment::{
    compromise_filter, decimal, run_experiment, summarize, ExperimentResult, ExperimentRow, Metric, SummaryRow,
    CSV_HEADER, SUMMARY_HEADER,
};
pub use native::{load_profile, read_profile, write_profile};
pub use preflib::{parse_preflib, serialize_preflib, top_i_approvals, PreflibElection, RankedBallot};
pub use uniform::{gen_uniform_profile, uniform_dataset, UniformParams};
