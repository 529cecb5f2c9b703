//! Monte-Carlo harness, CSV emission, and invariant checks for the NNLS
//! symbol-level precoding solvers.

pub mod check;
pub mod config;
pub mod csvout;
pub mod sim;
