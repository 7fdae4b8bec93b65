//! Ideal total-number measurement on pure inputs: outcome enumeration and
//! sampling, maximality checks, the three-party extension and Monte-Carlo runs.

pub mod ghz;
pub mod outcomes;
pub mod params;
pub mod run;

pub use ghz::{ghz_prepare, GhzOutcome, GhzState, GhzTerm};
pub use outcomes::{enumerate_outcomes, sample_outcome, verify_maximal, OutcomeRecord, OutcomeSampler};
pub use params::ProtocolParams;
pub use run::{protocol_run, HistogramBin, ProtocolSummary};
