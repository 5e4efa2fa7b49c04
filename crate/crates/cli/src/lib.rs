//! Configuration parsing and command dispatch for the `hazardlab` binary.

pub mod config;
pub mod run;

pub use config::{parse_config, ConfigError, Expectation, Format, Kind, RunConfig};
pub use run::{provenance_comment, run, RunError, Status};
