//! Command-line front end for `resfin-core`: input formats, artifacts and the
//! acceptance suite.

pub mod acceptance;
pub mod commands;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod manifest;
pub mod rfmx;

pub use commands::{exit_code, run, Options, COMMANDS, USAGE};
pub use error::{CliError, CliResult};
pub use format::Input;
pub use manifest::{Artifact, Certificate, RunManifest, Status};
