//! File formats, scenario configs, the multi-threaded Monte Carlo runner, and
//! the command implementations behind the `pollinator` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod parallel;
pub mod usage;

pub use error::Failure;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "POLLINATOR_OUT_DIR";
