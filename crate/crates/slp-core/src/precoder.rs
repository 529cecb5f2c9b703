//! Transmit-vector recovery and constructive-interference feasibility.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::assembly::NnlsProblem;
use crate::nnls::NnlsSolution;

/// A recovered transmit vector with its power and CI margins.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecodeResult {
    /// Complex transmit signal (length `N`).
    pub u_complex: DVector<Complex64>,
    /// Real lifting `[Re u; Im u]` (length `2N`).
    pub u_real: DVector<f64>,
    /// `||u||^2` in linear watts (normalized units).
    pub power_linear: f64,
    /// `10 log10` of the linear power.
    pub power_dbw: f64,
    /// `A (H u - S G^(1/2) x)`, evaluated from `u` directly; weight-1
    /// entries must be non-negative and weight-0 entries zero.
    pub margins: DVector<f64>,
    /// Copy of the binary weight diagonal, aligned with `margins`.
    pub weights: DVector<f64>,
}

/// Recover the transmit vector for `solution` and evaluate its CI margins.
///
/// The transmit vector is `u = y - B delta` (the minimum-norm vector
/// meeting the stacked constraints); the margins are recomputed from the
/// lifted channel directly so that feasibility is evidence independent of
/// the `(B, y)` assembly path.
pub fn recover_transmit(problem: &NnlsProblem, solution: &NnlsSolution) -> PrecodeResult {
    let u_real = &problem.y_vector - &problem.b_matrix * &solution.delta;
    let lifted = &problem.lifted;
    let received = &lifted.h_tilde * &u_real - &lifted.sigma_gamma_x;
    let margins = &lifted.a_block * received;

    let n = lifted.n_tx();
    let u_complex =
        DVector::from_fn(n, |i, _| Complex64::new(u_real[i], u_real[n + i]));
    let power_linear = u_real.norm_squared();
    let power_dbw = 10.0 * libm::log10(power_linear);

    PrecodeResult {
        u_complex,
        u_real,
        power_linear,
        power_dbw,
        margins,
        weights: lifted.w_diag.clone(),
    }
}

/// Check the margins: every weight-1 entry at least `-tolerance`, every
/// weight-0 entry within `tolerance` of zero.
pub fn ci_margins_ok(result: &PrecodeResult, tolerance: f64) -> bool {
    result
        .margins
        .iter()
        .zip(result.weights.iter())
        .all(|(&m, &w)| if w == 1.0 { m >= -tolerance } else { libm::fabs(m) <= tolerance })
}
