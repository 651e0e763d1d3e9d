//! Runs, sweeps and artifacts for the `h3wave` simulator: the flat
//! configuration format, the eight commands, their CSV tables and the
//! JSON-lines run summary.

pub mod checks;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod pool;

pub use commands::{run, Command, Context};
pub use config::{ConfigError, RunConfig};
pub use error::{LabError, LabResult};
