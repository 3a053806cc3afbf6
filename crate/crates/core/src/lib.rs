//! Permutation statistics over coefficient arrays in `[0, 1]` and the
//! exchangeable-pair machinery used to prove Bernstein-type concentration
//! for them.
//!
//! Three statistics are covered, for uniformly random permutations `σ`, `π`
//! of `{1..n}`:
//!
//! ```text
//! T1 = Σ_i Σ_j a[i][j][σ(i)]      (3-D array)
//! T2 = Σ_i a[i][σ(i)][π(i)]       (3-D array)
//! T3 = Σ_i a[i][σ(i)]             (2-D array)
//! ```
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the parallel Monte
//! Carlo driver and the command line live in the `permconc-tools` crate.
//!
//! Indices in the Rust API are 0-based. Every external format (JSON files,
//! CLI output) is 1-based.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod arrays;
pub mod bounds;
mod error;
pub mod exchange;
pub mod oracle;
pub mod permutations;
pub mod sampling;
pub mod statistics;

pub use arrays::{Array, Array2, Array3};
pub use error::{Error, Result};
pub use permutations::{IndexTriple, Permutation, TupleClass};
pub use statistics::StatKind;
