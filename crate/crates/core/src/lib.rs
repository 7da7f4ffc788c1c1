//! Brownian last passage percolation: exact max-plus dynamics on a grid,
//! the KPZ-scaled weight system built on top of it, initial conditions, and
//! the statistical tools used to test limit-shape and regularity behaviour.

// `!(x >= lo)` style guards reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod env;
pub mod error;
pub mod lpp;
pub mod scaled;
pub mod initcond;
pub mod stats;

pub use env::{required_grid, sample_environment, Environment, GridSpec, LineSource};
pub use error::{Error, Result};
