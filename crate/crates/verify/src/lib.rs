//! Configuration-driven verification scenarios for `maxlip-core`.
//!
//! A [`ScenarioConfig`] names grids, exponents and function banks; a scenario
//! turns them into a list of [`Check`]s, each either a hard pass/fail
//! relation with a tolerance or a monitored value that never affects the
//! exit status.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod compute;
pub mod config;
pub mod error;
pub mod report;
pub mod scenarios;

pub use config::{Scenario, ScenarioConfig};
pub use error::VerifyError;
pub use report::{Check, Format, Relation, Report, Status};
pub use scenarios::{run_checks, run_scenario};
