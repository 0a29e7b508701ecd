//! Experiment runner, reproduction suite and file formats behind the `deblur`
//! command-line tool.

pub mod error;
pub mod experiment;
pub mod golden;
pub mod imagearg;
pub mod output;
pub mod reproduce;

pub use error::{HarnessError, Result};
pub use experiment::{
    execute, render, run_experiment, ExperimentOutcome, ExperimentSpec, Format, Method, Target,
};
pub use golden::{delta_table, ramp_table, GoldenTable};
pub use reproduce::{reproduce, CaseReport, Check, Status, CASES};
