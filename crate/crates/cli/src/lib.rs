//! Batch front end for `tumorseg`: dataset pairing, parallel evaluation,
//! post-processing runs and report emission.

pub mod args;
pub mod config;
pub mod error;
pub mod pairing;
pub mod report;
pub mod run;

pub use config::{ReportFormat, RunConfig};
pub use error::{CliError, Result};
pub use pairing::{pair_cases, CasePair, Pairing};
pub use report::{Aggregate, CaseOutcome, DatasetReport, Metric};
pub use run::{cmd_ensemble, cmd_evaluate, cmd_fixtures, cmd_postprocess, evaluate_dataset};
