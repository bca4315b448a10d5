//! Runs containing at most one failure of each of two types.
//!
//! Trials take one of three values: success, a type-I failure (`+`) or a
//! type-II failure (`-`). A block of consecutive trials is *at most 1+1
//! contaminated* when it holds at most one `+` and at most one `-`. This crate
//! provides:
//!
//! - [`model`]: the outcome alphabet, trial distributions and derived constants.
//! - [`analytic`]: closed-form window probabilities, the clumping correction
//!   `alpha`, the sandwich bounds for the no-occurrence probability, the
//!   exponential law of the first hitting time and the accompanying
//!   distribution of the longest run.
//! - [`scan`]: constant-memory single-pass computation of the longest run and
//!   the first hitting time.
//! - [`oracle`]: exact ground truth by enumeration and by a dynamic program.
//! - [`montecarlo`]: seeded, thread-count-invariant simulation experiments and
//!   empirical-vs-theoretical comparison.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::len_without_is_empty)]

pub mod analytic;
mod error;
pub mod model;
pub mod montecarlo;
pub mod oracle;
pub mod scan;

pub use error::{Error, Result};
pub use model::{DerivedConstants, Outcome, TrialDistribution, WindowSpec};
