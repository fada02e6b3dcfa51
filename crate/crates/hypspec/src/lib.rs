//! IO, configuration and the command-line front end for `hypspec-core`.
//!
//! Exit codes: 0 pass, 1 a check ran and failed, 2 hypothesis-gate refusal,
//! 3 element budget exceeded (partial cache written), 4 invalid input or
//! file error.

pub mod cache_file;
pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::RunConfig;
pub use error::CliError;
