//! SINR-constrained power-minimization symbol-level precoding (SLP) as a
//! non-negative least squares (NNLS) problem.
//!
//! The pipeline: build a modulation constellation together with the
//! distance-preserving constructive interference region (DPCIR) of each
//! point, lift one downlink symbol slot to real coordinates, assemble the
//! standard-form NNLS pair `(B, y)`, minimize `||y - B d||^2` over `d >= 0`
//! with one of several solvers, and recover the complex transmit vector.
//!
//! Solvers:
//! - [`nnls::solve_exact`] — Lawson-Hanson active set (global minimizer),
//! - [`nnls::solve_apgd`] — accelerated projected gradient descent,
//! - [`nnls::solve_cf`] / [`nnls::solve_icf`] — closed-form support-recovery
//!   approximations (ICF adds a validation pass over the candidate support),
//! - the zero vector (symbol-level zero forcing) as the trivial baseline.
//!
//! The crate is `no_std` (with `alloc`); everything here is pure
//! computation, safe for unrestricted concurrent use.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod assembly;
pub mod constellation;
pub mod error;
pub mod linalg;
pub mod nnls;
pub mod precoder;

pub use assembly::{assemble_nnls, lift, LiftedSystem, NnlsProblem, SlpInstance, UserChannel};
pub use constellation::{
    dpcir, make_constellation, CirSpec, Constellation, ConstellationPoint, ModulationKind,
    PointKind,
};
pub use error::Error;
pub use nnls::{
    solve_apgd, solve_cf, solve_exact, solve_icf, solve_zf, verify_support, NnlsSolution, Solver,
    SupportCheck,
};
pub use precoder::{ci_margins_ok, recover_transmit, PrecodeResult};

pub use nalgebra;
