//! Closed-form support-recovery approximations.
//!
//! Both routes start from the correlations `d_i = y^T b_i`: columns with
//! `d_i > tau` form the initial support estimate. The plain closed form
//! solves the restricted least squares on that estimate directly; the
//! improved variant first drops estimate columns whose restricted solution
//! entry is non-positive, then re-solves on the validated set. Any negative
//! entries left in the final restricted solution are clamped to zero.

use alloc::vec::Vec;

use nalgebra::DVector;

use super::{strict_tolerance, NnlsSolution, Solver};
use crate::assembly::NnlsProblem;
use crate::linalg;

fn initial_support(problem: &NnlsProblem, tau: f64) -> Vec<usize> {
    let correlations = problem.b_matrix.transpose() * &problem.y_vector;
    (0..problem.n_vars())
        .filter(|&i| correlations[i] > tau)
        .collect()
}

fn zero_solution(
    problem: &NnlsProblem,
    solver: Solver,
    initial: Vec<usize>,
    validated: Option<Vec<usize>>,
) -> NnlsSolution {
    let mut out =
        NnlsSolution::from_delta(problem, DVector::zeros(problem.n_vars()), 0, solver);
    out.initial_support = Some(initial);
    out.validated_support = validated;
    out
}

fn clamped_restricted_solution(
    problem: &NnlsProblem,
    support: &[usize],
) -> (DVector<f64>, DVector<f64>) {
    let b_sub = linalg::select_columns(&problem.b_matrix, support);
    let z = linalg::lstsq(&b_sub, &problem.y_vector);
    let clamped = z.map(|v| v.max(0.0));
    (linalg::scatter(problem.n_vars(), support, &clamped), z)
}

/// Closed-form solution: restricted least squares on the initial support
/// estimate, clamped to the non-negative orthant and zero-padded.
///
/// An empty estimate falls back to `delta = 0` (the zero-forcing solution).
pub fn solve_cf(problem: &NnlsProblem) -> NnlsSolution {
    let tau = strict_tolerance(problem);
    let estimate = initial_support(problem, tau);
    if estimate.is_empty() {
        return zero_solution(problem, Solver::Cf, estimate, None);
    }
    let (delta, _) = clamped_restricted_solution(problem, &estimate);
    let mut out = NnlsSolution::from_delta(problem, delta, 0, Solver::Cf);
    out.initial_support = Some(estimate);
    out
}

/// Improved closed-form solution: validate the initial estimate before the
/// final restricted solve.
///
/// The validated support keeps only estimate columns whose entry of the
/// restricted least-squares solution exceeds the strict tolerance; the
/// final solution is the clamped restricted solve on the validated set.
/// An empty estimate at either step falls back to `delta = 0`.
pub fn solve_icf(problem: &NnlsProblem) -> NnlsSolution {
    let tau = strict_tolerance(problem);
    let estimate = initial_support(problem, tau);
    if estimate.is_empty() {
        return zero_solution(problem, Solver::Icf, estimate, Some(Vec::new()));
    }

    let b_sub = linalg::select_columns(&problem.b_matrix, &estimate);
    let trial = linalg::lstsq(&b_sub, &problem.y_vector);
    let validated: Vec<usize> = estimate
        .iter()
        .enumerate()
        .filter(|&(p, _)| trial[p] > tau)
        .map(|(_, &i)| i)
        .collect();
    if validated.is_empty() {
        return zero_solution(problem, Solver::Icf, estimate, Some(validated));
    }

    let (delta, _) = clamped_restricted_solution(problem, &validated);
    let mut out = NnlsSolution::from_delta(problem, delta, 0, Solver::Icf);
    out.initial_support = Some(estimate);
    out.validated_support = Some(validated);
    out
}
