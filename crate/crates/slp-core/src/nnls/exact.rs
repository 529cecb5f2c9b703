//! Lawson-Hanson active-set solver: the exact NNLS baseline.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::{strict_tolerance, NnlsSolution, Solver};
use crate::assembly::NnlsProblem;
use crate::error::Error;
use crate::linalg;

/// Solve `min ||y - B d||^2`, `d >= 0` to optimality.
///
/// Classic Lawson-Hanson: grow a passive set by the most positive dual
/// coordinate (smallest index on ties, which also rules out cycling), solve
/// the restricted least squares, and step back toward the previous iterate
/// whenever the restricted solution leaves the positive orthant. A candidate
/// whose own tentative coefficient is non-positive is rejected for the rest
/// of the pass, as in the original algorithm. Restricted solves go through
/// a rank-revealing SVD.
///
/// Errors with [`Error::IterationCap`] carrying the best iterate if the
/// outer loop exceeds `10 * 2K` passes, which signals numerical degeneracy.
pub fn solve_exact(problem: &NnlsProblem) -> Result<NnlsSolution, Error> {
    let b = &problem.b_matrix;
    let y = &problem.y_vector;
    let n_vars = b.ncols();
    let tau = strict_tolerance(problem);
    let max_outer = 10 * n_vars;

    let mut passive: Vec<usize> = Vec::new();
    let mut delta: DVector<f64> = DVector::zeros(n_vars);
    let mut outer = 0usize;

    'outer: loop {
        // Dual vector w = B^T (y - B delta); optimal once no inactive
        // coordinate exceeds the strict tolerance. Zero-weight columns of B
        // have w identically zero, so they can never enter the passive set.
        let residual = y - b * &delta;
        let w = b.transpose() * &residual;
        let mut rejected: Vec<usize> = Vec::new();

        loop {
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..n_vars {
                if passive.binary_search(&j).is_ok() || rejected.contains(&j) {
                    continue;
                }
                if w[j] > tau && entering.is_none_or(|(_, best)| w[j] > best) {
                    entering = Some((j, w[j]));
                }
            }
            let Some((j_new, _)) = entering else {
                break 'outer;
            };

            outer += 1;
            if outer > max_outer {
                return Err(Error::IterationCap {
                    iterations: max_outer,
                    best: NnlsSolution::from_delta(problem, delta, outer, Solver::Exact),
                });
            }

            let pos = passive.binary_search(&j_new).unwrap_err();
            passive.insert(pos, j_new);
            let mut b_passive = linalg::select_columns(b, &passive);
            let mut z = linalg::lstsq(&b_passive, y);
            if z[pos] <= 0.0 {
                // Roundoff-level candidate: entering it cannot move the
                // iterate. Drop it for this pass and try the next best.
                passive.remove(pos);
                rejected.push(j_new);
                continue;
            }

            inner_descent(problem, &mut passive, &mut delta, &mut b_passive, &mut z);
            break;
        }
    }

    Ok(NnlsSolution::from_delta(problem, delta, outer, Solver::Exact))
}

/// Restricted least-squares descent: accept `z` when positive, otherwise
/// step to the boundary, move blocked coordinates back to the active set,
/// and re-solve on the shrunken passive set.
fn inner_descent(
    problem: &NnlsProblem,
    passive: &mut Vec<usize>,
    delta: &mut DVector<f64>,
    b_passive: &mut DMatrix<f64>,
    z: &mut DVector<f64>,
) {
    let n_vars = problem.n_vars();
    loop {
        if z.iter().all(|&v| v > 0.0) {
            *delta = linalg::scatter(n_vars, passive, z);
            return;
        }

        let mut alpha = f64::INFINITY;
        for (p, &idx) in passive.iter().enumerate() {
            if z[p] <= 0.0 {
                let t = delta[idx] / (delta[idx] - z[p]);
                if t < alpha {
                    alpha = t;
                }
            }
        }
        let blocked: Vec<usize> = passive
            .iter()
            .enumerate()
            .filter(|&(p, &idx)| z[p] <= 0.0 && delta[idx] / (delta[idx] - z[p]) <= alpha)
            .map(|(_, &idx)| idx)
            .collect();
        for (p, &idx) in passive.iter().enumerate() {
            delta[idx] += alpha * (z[p] - delta[idx]);
        }
        for &idx in &blocked {
            delta[idx] = 0.0;
        }
        // Roundoff can push other passive entries through zero; drop those
        // too rather than carrying negatives.
        passive.retain(|&idx| delta[idx] > 0.0);
        for j in 0..n_vars {
            if delta[j] < 0.0 {
                delta[j] = 0.0;
            }
        }
        if passive.is_empty() {
            return;
        }
        *b_passive = linalg::select_columns(&problem.b_matrix, passive);
        *z = linalg::lstsq(b_passive, &problem.y_vector);
    }
}
