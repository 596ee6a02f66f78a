//! Library half of the `dualavg` binary.
//!
//! Everything the CLI does — config parsing, presets, multi-seed
//! execution, aggregation, decay-rate fitting — lives here so the
//! integration and acceptance suites can drive experiments in-process and
//! inspect the results directly; `main.rs` only adds argument parsing and
//! printing.

pub mod config;
pub mod error;
pub mod presets;
pub mod ratefit;
pub mod runner;

pub use error::{CliError, Result};
