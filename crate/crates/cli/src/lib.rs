//! Batch driver for `dualflow`: run configurations, flows, verification
//! suites and their on-disk artifacts.

pub mod config;
pub mod driver;

pub use config::{parse_config, ConfigError, InitialSpec, Preset, RunConfig};
pub use driver::{execute, DriverError, Report};
