//! Fitted finite-volume LOD solver for the Hull–White stochastic volatility
//! pricing equation on `[0, X] × [ζ, Y]`.

// NaN must fail the parameter checks, hence `!(x > 0.0)` style guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bs1d;
pub mod csvfmt;
pub mod error;
pub mod flux;
pub mod line;
pub mod lod;
pub mod mesh;
pub mod model;
pub mod problems;
pub mod tables;
pub mod tridiag;

pub use error::{Error, Result};
