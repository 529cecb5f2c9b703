//! Solvers for the standard-form NNLS problem `min ||y - B d||^2`, `d >= 0`.
//!
//! Four routes plus the trivial baseline:
//! - `solve_exact`: Lawson-Hanson active set, the global minimizer;
//! - `solve_apgd`: accelerated projected gradient descent with a capped
//!   iteration count;
//! - `solve_cf`: closed-form support guess from the signs of `B^T y`;
//! - `solve_icf`: the same guess followed by a validation pass that drops
//!   candidate columns whose restricted least-squares entry is negative;
//! - `solve_zf`: `d = 0` (symbol-level zero forcing).
//!
//! `verify_support` checks the two sufficient conditions under which a
//! candidate support provably coincides with the optimal one.

mod apgd;
mod closed_form;
mod exact;
mod support;

pub use apgd::solve_apgd;
pub use closed_form::{solve_cf, solve_icf};
pub use exact::solve_exact;
pub use support::{verify_support, SupportCheck};

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use nalgebra::DVector;

use crate::assembly::NnlsProblem;

/// Which route produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    Exact,
    Apgd,
    Cf,
    Icf,
    Zf,
}

impl Solver {
    pub const ALL: [Solver; 5] = [
        Solver::Exact,
        Solver::Apgd,
        Solver::Cf,
        Solver::Icf,
        Solver::Zf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Solver::Exact => "exact",
            Solver::Apgd => "apgd",
            Solver::Cf => "cf",
            Solver::Icf => "icf",
            Solver::Zf => "zf",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Solver {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Solver::Exact),
            "apgd" => Ok(Solver::Apgd),
            "cf" => Ok(Solver::Cf),
            "icf" => Ok(Solver::Icf),
            "zf" => Ok(Solver::Zf),
            other => Err(crate::Error::InvalidInstance(alloc::format!(
                "unknown solver {other:?} (expected exact|apgd|cf|icf|zf)"
            ))),
        }
    }
}

/// A non-negative solution of the NNLS problem, with its support and the
/// candidate supports recorded by the closed-form routes.
#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution {
    /// Entrywise non-negative; exactly zero on weight-0 coordinates.
    pub delta: DVector<f64>,
    /// Indices with strictly positive entries, ascending.
    pub support: Vec<usize>,
    /// `||y - B delta||^2` for the stored `delta`.
    pub objective: f64,
    /// Iterations spent (0 for the closed-form routes and ZF).
    pub iterations: usize,
    pub solver: Solver,
    /// First support estimate (CF and ICF), ascending.
    pub initial_support: Option<Vec<usize>>,
    /// Validated support estimate (ICF only), ascending.
    pub validated_support: Option<Vec<usize>>,
}

impl NnlsSolution {
    pub(crate) fn from_delta(
        problem: &NnlsProblem,
        delta: DVector<f64>,
        iterations: usize,
        solver: Solver,
    ) -> Self {
        let support = (0..delta.len()).filter(|&j| delta[j] > 0.0).collect();
        let objective = objective(problem, &delta);
        NnlsSolution {
            delta,
            support,
            objective,
            iterations,
            solver,
            initial_support: None,
            validated_support: None,
        }
    }

    /// `L1 = |initial support|`, when the solver recorded one.
    pub fn support_l1(&self) -> Option<usize> {
        self.initial_support.as_ref().map(Vec::len)
    }

    /// `L2 = |validated support|`, when the solver recorded one.
    pub fn support_l2(&self) -> Option<usize> {
        self.validated_support.as_ref().map(Vec::len)
    }

    /// Infinity norm of the complementarity residual
    /// `min(delta, -B^T (y - B delta))`; near zero at the global minimizer.
    pub fn kkt_residual(&self, problem: &NnlsProblem) -> f64 {
        let residual = &problem.y_vector - &problem.b_matrix * &self.delta;
        let gradient = -(problem.b_matrix.transpose() * residual);
        (0..self.delta.len())
            .map(|j| libm::fabs(self.delta[j].min(gradient[j])))
            .fold(0.0, f64::max)
    }
}

/// `||y - B delta||^2`.
pub fn objective(problem: &NnlsProblem, delta: &DVector<f64>) -> f64 {
    (&problem.y_vector - &problem.b_matrix * delta).norm_squared()
}

/// Scale-invariant tolerance for every strict `> 0` test in the support
/// estimates and in the Lemma-2 conditions.
pub fn strict_tolerance(problem: &NnlsProblem) -> f64 {
    let max_col = (0..problem.b_matrix.ncols())
        .map(|j| problem.b_matrix.column(j).norm())
        .fold(0.0, f64::max);
    1e-12 * problem.y_vector.norm() * max_col
}

/// The zero-forcing baseline `delta = 0` with objective `||y||^2`.
pub fn solve_zf(problem: &NnlsProblem) -> NnlsSolution {
    NnlsSolution::from_delta(
        problem,
        DVector::zeros(problem.n_vars()),
        0,
        Solver::Zf,
    )
}
