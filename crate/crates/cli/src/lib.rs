//! File formats and the command-line front end for `icp-core`.
//!
//! - [`instance`]: the text format for constraint networks.
//! - [`dataset`]: CSV regression datasets.
//! - [`config`]: TOML scenario configurations.
//! - [`metrics`] and [`log`]: JSON-lines outputs of a scenario run.
//! - [`scenario`] and [`commands`]: the `solve`, `fit` and `run` commands.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod instance;
pub mod log;
pub mod metrics;
pub mod scenario;
