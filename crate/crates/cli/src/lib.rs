//! Scenario files, pipeline runners and the golden-file suite behind the
//! `transfer` command.

pub mod run;
pub mod scenario;
pub mod suite;

pub use run::{run_pipeline, run_scenario, validate, CaseReport, Flags, Report, Status};
pub use scenario::{Scenario, VERSION};
