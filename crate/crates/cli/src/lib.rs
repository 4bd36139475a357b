//! File formats and commands behind the `manifold` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod matrix;

pub use commands::{Analysis, AnalyzeOptions, Epsilon};
pub use error::{CliError, Result};
pub use manifest::{DatasetManifest, Normalize, Preprocess};
pub use matrix::SignalMatrix;
