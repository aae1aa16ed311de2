//! Files, parallelism and the command line around [`rft_core`].
//!
//! * [`rfgrid`]: the plain-text grid format.
//! * [`config`]: `key = value` simulation configs.
//! * [`table`]: CSV output of EC curves.
//! * [`parallel`]: the rayon replicate driver.
//! * [`validate`]: the acceptance suites behind `rft validate`.
//! * [`cli`]: argument parsing and the subcommands.

pub mod cli;
pub mod config;
pub mod error;
pub mod parallel;
pub mod rfgrid;
pub mod table;
pub mod validate;

pub use error::{Error, Result};
