//! Experiment harness for the dyadic product-space laboratory: seeded
//! corpora, suites, reports and file formats. The `lab` binary wraps it.

pub mod config;
pub mod corpus;
pub mod formats;
pub mod report;
pub mod suites;

pub use config::{ExperimentConfig, Family, Suite};
pub use report::{Assertion, Report};
pub use suites::run_suite;
