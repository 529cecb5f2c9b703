//! Small dense linear-algebra helpers shared by assembly and the solvers.
//!
//! Everything routes through nalgebra's SVD so that rank decisions are made
//! with one consistent tolerance: `max(rows, cols) * eps * sigma_max`.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

/// Rank tolerance for an SVD of a `rows x cols` matrix whose largest
/// singular value is `sigma_max`.
pub fn rank_tolerance(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    let dim = if rows > cols { rows } else { cols };
    dim as f64 * f64::EPSILON * sigma_max
}

/// SVD-backed pseudo-inverse together with the spectrum data callers need
/// for degeneracy decisions.
pub struct Pinv {
    pub matrix: DMatrix<f64>,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub rank: usize,
    pub tolerance: f64,
}

/// Moore-Penrose pseudo-inverse of `m` with the shared rank tolerance.
///
/// `sigma_min` is the smallest singular value of `m` (zero for a wide or
/// tall matrix only when `m` is genuinely rank-deficient).
pub fn pinv(m: &DMatrix<f64>) -> Pinv {
    let (rows, cols) = m.shape();
    let svd = m.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let sigma_min = svd.singular_values.min();
    let tolerance = rank_tolerance(rows, cols, sigma_max);
    let rank = svd.singular_values.iter().filter(|&&s| s > tolerance).count();
    let matrix = svd
        .pseudo_inverse(tolerance)
        .expect("tolerance is non-negative");
    Pinv {
        matrix,
        sigma_max,
        sigma_min,
        rank,
        tolerance,
    }
}

/// Minimum-norm least-squares solution of `a x ~ b` through a fresh SVD.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let (rows, cols) = a.shape();
    let svd = a.clone().svd(true, true);
    let tolerance = rank_tolerance(rows, cols, svd.singular_values.max());
    svd.solve(b, tolerance).expect("tolerance is non-negative")
}

/// Largest and smallest singular values of `m`.
pub fn singular_extremes(m: &DMatrix<f64>) -> (f64, f64) {
    let svd = m.clone().svd(false, false);
    (svd.singular_values.max(), svd.singular_values.min())
}

/// Numerical rank of `m` under the shared tolerance.
pub fn rank(m: &DMatrix<f64>) -> usize {
    let (rows, cols) = m.shape();
    let svd = m.clone().svd(false, false);
    let tolerance = rank_tolerance(rows, cols, svd.singular_values.max());
    svd.singular_values.iter().filter(|&&s| s > tolerance).count()
}

/// Columns of `m` selected by `indices`, in the given order.
pub fn select_columns(m: &DMatrix<f64>, indices: &[usize]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m.nrows(), indices.len());
    for (j, &idx) in indices.iter().enumerate() {
        out.set_column(j, &m.column(idx));
    }
    out
}

/// Residual of `y` after projecting out the span of `basis` columns,
/// i.e. `P_perp y` for the orthogonal-complement projector of `basis`.
///
/// Returns `None` when the columns of `basis` are linearly dependent
/// (numerical rank below the column count).
pub fn orthogonal_residual(basis: &DMatrix<f64>, y: &DVector<f64>) -> Option<DVector<f64>> {
    if basis.ncols() == 0 {
        return Some(y.clone());
    }
    let (rows, cols) = basis.shape();
    let svd = basis.clone().svd(true, false);
    let tolerance = rank_tolerance(rows, cols, svd.singular_values.max());
    let rank = svd.singular_values.iter().filter(|&&s| s > tolerance).count();
    if rank < cols {
        return None;
    }
    let u = svd.u.as_ref().expect("u requested");
    // P_perp y = y - U_r (U_r^T y), restricted to the rank-r leading columns.
    let mut residual = y.clone();
    for j in 0..rank {
        let uj = u.column(j);
        let coef = uj.dot(y);
        residual.axpy(-coef, &uj, 1.0);
    }
    Some(residual)
}

/// Scatter `values` (aligned with `indices`) into a zero vector of length `len`.
pub fn scatter(len: usize, indices: &[usize], values: &DVector<f64>) -> DVector<f64> {
    debug_assert_eq!(indices.len(), values.len());
    let mut out = DVector::zeros(len);
    for (&idx, &v) in indices.iter().zip(values.iter()) {
        out[idx] = v;
    }
    out
}

/// Indices `0..len` not present in `selected` (which must be sorted).
pub fn complement(len: usize, selected: &[usize]) -> Vec<usize> {
    debug_assert!(selected.windows(2).all(|w| w[0] < w[1]));
    let mut out = Vec::with_capacity(len - selected.len());
    let mut it = selected.iter().peekable();
    for i in 0..len {
        if it.peek() == Some(&&i) {
            it.next();
        } else {
            out.push(i);
        }
    }
    out
}
