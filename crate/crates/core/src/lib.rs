//! Sums of independent Bernoulli variables, the calculus of their Shannon
//! entropy, and the capacity region of the `s`-user multiple access adder
//! channel (MAAC).
//!
//! * [`pbin`]: Poisson-binomial PMFs, leave-out vectors, the difference operator.
//! * [`entcalc`]: entropy in bits with analytic gradient, Hessian and
//!   directional curvature, plus finite-difference oracles.
//! * [`verify`]: numerical certificates that the all-½ vector maximizes the
//!   entropy of a Bernoulli sum.
//! * [`region`]: the MAAC capacity polyhedron, membership and export.
//! * [`cli`]: the `maac` command-line front end.
//!
//! Indices are zero-based throughout the API.

pub mod cli;
pub mod entcalc;
mod error;
pub mod fmt;
pub mod pbin;
pub mod region;
pub mod verify;

pub use error::{Error, Result};
