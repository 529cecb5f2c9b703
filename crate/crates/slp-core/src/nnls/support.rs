//! Sufficient conditions for a candidate support to be the optimal one.

use alloc::format;
use alloc::vec::Vec;

use super::strict_tolerance;
use crate::assembly::NnlsProblem;
use crate::error::Error;
use crate::linalg;

/// Outcome of the two support-optimality conditions for one candidate set.
///
/// C1 requires the restricted least-squares solution on the candidate
/// columns to be strictly positive. C2 requires the residual of `y` after
/// projecting out the candidate columns to correlate strictly negatively
/// with every excluded column of `B`; excluded here means every non-zero
/// column outside the candidate (zero-weight columns have identically zero
/// correlations and can never enter any support, so they are skipped).
#[derive(Debug, Clone, PartialEq)]
pub struct SupportCheck {
    pub c1_holds: bool,
    pub c2_holds: bool,
    /// Smallest entry of the restricted solution; `+inf` for an empty
    /// candidate (C1 is then vacuous).
    pub min_c1_value: f64,
    /// Largest projected correlation over the complement; `-inf` when the
    /// complement is empty (C2 is then vacuous).
    pub max_c2_value: f64,
}

impl SupportCheck {
    /// Both sufficient conditions hold: the candidate provably coincides
    /// with the support of the exact minimizer.
    pub fn certifies(&self) -> bool {
        self.c1_holds && self.c2_holds
    }
}

/// Evaluate both conditions for `candidate` (treated as a set; order and
/// duplicates do not matter beyond the linear-independence requirement).
///
/// Errors with [`Error::DependentSupport`] when the candidate columns are
/// linearly dependent, which the conditions require.
pub fn verify_support(problem: &NnlsProblem, candidate: &[usize]) -> Result<SupportCheck, Error> {
    let n_vars = problem.n_vars();
    let mut cand: Vec<usize> = candidate.to_vec();
    cand.sort_unstable();
    for &i in &cand {
        if i >= n_vars {
            return Err(Error::InvalidInstance(format!(
                "candidate column {i} out of range for {n_vars} variables"
            )));
        }
    }
    if cand.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DependentSupport {
            candidate_rank: cand.len() - 1,
            candidate_len: cand.len(),
        });
    }

    let b = &problem.b_matrix;
    let y = &problem.y_vector;
    let tau = strict_tolerance(problem);

    let b_sub = linalg::select_columns(b, &cand);
    let Some(residual) = linalg::orthogonal_residual(&b_sub, y) else {
        return Err(Error::DependentSupport {
            candidate_rank: linalg::rank(&b_sub),
            candidate_len: cand.len(),
        });
    };

    let min_c1_value = if cand.is_empty() {
        f64::INFINITY
    } else {
        let z = linalg::lstsq(&b_sub, y);
        z.min()
    };
    let c1_holds = min_c1_value > tau;

    let mut max_c2_value = f64::NEG_INFINITY;
    for i in linalg::complement(n_vars, &cand) {
        if problem.lifted.w_diag[i] == 0.0 {
            continue;
        }
        let corr = residual.dot(&b.column(i));
        if corr > max_c2_value {
            max_c2_value = corr;
        }
    }
    let c2_holds = max_c2_value < -tau;

    Ok(SupportCheck {
        c1_holds,
        c2_holds,
        min_c1_value,
        max_c2_value,
    })
}
