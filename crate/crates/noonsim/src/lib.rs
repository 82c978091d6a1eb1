//! Scenario files, output formats and the runner behind the `noonsim` binary.

pub mod config;
pub mod formats;
pub mod run;
