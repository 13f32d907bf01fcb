//! Mutual-information uncertainty relations for measurements on shared
//! finite-dimensional quantum states.
//!
//! The crate evaluates entropic and mutual-information inequalities on
//! bipartite measurement scenarios, computes the overlap coefficients that
//! appear on their right-hand sides, and searches for violations with a
//! real-coded genetic algorithm. All logarithms are base 2.

pub mod coefficients;
pub mod error;
pub mod ga;
pub mod infomeasures;
pub mod qcore;
pub mod relations;
pub mod scenarios;
mod serde_f64;
pub mod tol;

pub use error::{Error, Result};
