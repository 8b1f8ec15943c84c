//! File formats, command line and multi-threaded sweeps on top of `geodc-core`.

pub mod cli;
pub mod error;
pub mod format;
pub mod parallel;

pub use error::{Error, Result};
