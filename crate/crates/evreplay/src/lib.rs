//! Command-line pipeline around `evreplay-core`: trip-log CSV input,
//! TOML configuration, parallel fleet runs, CSV/JSON outputs and manifests.

pub mod cli;
pub mod config;
pub mod csvio;
pub mod error;
pub mod manifest;
pub mod pipeline;

pub use error::{CliError, Result};
