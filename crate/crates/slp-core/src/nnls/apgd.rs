//! Accelerated projected gradient descent with a fixed iteration budget.

use nalgebra::{DMatrix, DVector};

use super::{NnlsSolution, Solver};
use crate::assembly::NnlsProblem;
use crate::linalg;

/// Run `n_max` accelerated projected-gradient iterations from `delta = 0`.
///
/// The iteration is `delta_n = max(Q theta_{n-1} + phi, 0)` with
/// `Q = I - B^T B / ||B^T B||_F` and `phi = B^T y / ||B^T B||_F`, followed by
/// the momentum extrapolation `theta_n = delta_n + eta (delta_n - delta_{n-1})`.
///
/// When `B` has full column rank the momentum is the fixed optimal value for
/// a quadratic with condition number `kappa = (s_max / s_min)^2`, i.e.
/// `eta = (sqrt(kappa) - 1) / (sqrt(kappa) + 1)`. A rank-deficient `B`
/// (always the case when some symbol is interior) falls back to the
/// parameter-free schedule `eta_n = (n - 1) / (n + 2)`.
pub fn solve_apgd(problem: &NnlsProblem, n_max: usize) -> NnlsSolution {
    let b = &problem.b_matrix;
    let y = &problem.y_vector;
    let n_vars = b.ncols();
    if n_max == 0 {
        return NnlsSolution::from_delta(problem, DVector::zeros(n_vars), 0, Solver::Apgd);
    }

    let bt_b = b.transpose() * b;
    let fro = bt_b.norm();
    if fro == 0.0 {
        // All-interior slot: B = 0 and the iteration is the identity.
        return NnlsSolution::from_delta(problem, DVector::zeros(n_vars), n_max, Solver::Apgd);
    }
    let q = DMatrix::identity(n_vars, n_vars) - &bt_b / fro;
    let phi = (b.transpose() * y) / fro;

    let (s_max, s_min) = linalg::singular_extremes(b);
    let fixed_momentum = if s_min > linalg::rank_tolerance(b.nrows(), b.ncols(), s_max) {
        let sqrt_kappa = s_max / s_min;
        Some((sqrt_kappa - 1.0) / (sqrt_kappa + 1.0))
    } else {
        None
    };

    let mut delta: DVector<f64> = DVector::zeros(n_vars);
    let mut theta = delta.clone();
    for n in 1..=n_max {
        let mut next = &q * &theta + &phi;
        for v in next.iter_mut() {
            *v = v.max(0.0);
        }
        let eta =
            fixed_momentum.unwrap_or_else(|| (n as f64 - 1.0) / (n as f64 + 2.0));
        theta = &next + (&next - &delta) * eta;
        delta = next;
    }

    NnlsSolution::from_delta(problem, delta, n_max, Solver::Apgd)
}
