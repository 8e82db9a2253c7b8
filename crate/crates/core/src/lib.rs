//! Sketched and iteratively refined solvers for ridge regression.

// `!(x > 0.0)` is the NaN-rejecting form used for argument checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closedform;
pub mod dataio;
pub mod densela;
pub mod error;
pub mod pcg;
pub mod sketch;
pub mod solvers;
pub mod theory;

pub use error::{Error, Result};
