//! IO, file formats, parallel Monte Carlo and the verification suites for
//! the `permconc` command-line tool.

pub mod cli;
pub mod error;
pub mod exact;
pub mod formats;
pub mod grid;
pub mod interval;
pub mod montecarlo;
pub mod verify;

pub use error::{Result, ToolError};
