//! Real-valued lifting of one downlink symbol slot and assembly of the
//! standard-form NNLS pair.
//!
//! Complex quantities are lifted with the usual 2x2 rotation blocks so that
//! `H_k * u_tilde` reproduces `[Re(h_k u), Im(h_k u)]`. Stacking the per-user
//! joint CI/SINR constraints gives `A (H u - S G^(1/2) x) = W delta`,
//! `delta >= 0`; the minimum-norm transmit vector then solves
//! `min ||y - B delta||^2` over `delta >= 0` with `B = -H^+ A^(-1) W` and
//! `y = H^+ S G^(1/2) x`.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::constellation::{dpcir, Constellation};
use crate::error::Error;
use crate::linalg;

/// Flat-fading channel row of one user (length `N`, dimensionless gains).
#[derive(Debug, Clone, PartialEq)]
pub struct UserChannel {
    pub gains: Vec<Complex64>,
}

impl UserChannel {
    pub fn new(gains: Vec<Complex64>) -> Self {
        Self { gains }
    }

    pub fn n_tx(&self) -> usize {
        self.gains.len()
    }
}

/// One symbol slot of the downlink: channels, noise levels, SINR targets
/// (linear scale), and each user's intended constellation point.
#[derive(Debug, Clone, PartialEq)]
pub struct SlpInstance {
    pub channels: Vec<UserChannel>,
    pub noise_sigmas: Vec<f64>,
    pub sinr_targets: Vec<f64>,
    pub symbol_indices: Vec<usize>,
    pub constellation: Constellation,
}

impl SlpInstance {
    /// Validate lengths, `K <= N`, positivity of noise/SINR levels, finite
    /// nonzero channels, and symbol indices.
    pub fn new(
        channels: Vec<UserChannel>,
        noise_sigmas: Vec<f64>,
        sinr_targets: Vec<f64>,
        symbol_indices: Vec<usize>,
        constellation: Constellation,
    ) -> Result<Self, Error> {
        let k = channels.len();
        if k == 0 {
            return Err(Error::InvalidInstance("no users".into()));
        }
        let n = channels[0].n_tx();
        if n == 0 {
            return Err(Error::InvalidInstance("zero transmit antennas".into()));
        }
        if channels.iter().any(|c| c.n_tx() != n) {
            return Err(Error::InvalidInstance("channel lengths differ".into()));
        }
        if k > n {
            return Err(Error::InvalidInstance(format!("K = {k} exceeds N = {n}")));
        }
        if noise_sigmas.len() != k || sinr_targets.len() != k || symbol_indices.len() != k {
            return Err(Error::InvalidInstance(format!(
                "per-user lists must all have length K = {k}"
            )));
        }
        for c in &channels {
            if c.gains.iter().any(|g| !g.re.is_finite() || !g.im.is_finite()) {
                return Err(Error::InvalidInstance("non-finite channel entry".into()));
            }
            if c.gains.iter().all(|g| g.re == 0.0 && g.im == 0.0) {
                return Err(Error::InvalidInstance("identically zero channel".into()));
            }
        }
        if noise_sigmas.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidInstance("noise sigmas must be positive".into()));
        }
        if sinr_targets.iter().any(|&g| !(g > 0.0) || !g.is_finite()) {
            return Err(Error::InvalidInstance("SINR targets must be positive".into()));
        }
        for &m in &symbol_indices {
            constellation.point(m)?;
        }
        Ok(Self {
            channels,
            noise_sigmas,
            sinr_targets,
            symbol_indices,
            constellation,
        })
    }

    pub fn n_users(&self) -> usize {
        self.channels.len()
    }

    pub fn n_tx(&self) -> usize {
        self.channels[0].n_tx()
    }
}

/// The stacked real-valued system for one symbol slot.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedSystem {
    /// `2K x 2N` stacked lifting of the channel rows.
    pub h_tilde: DMatrix<f64>,
    /// Minimum-norm right pseudo-inverse of `h_tilde` (`2N x 2K`).
    pub h_pinv: DMatrix<f64>,
    /// Block-diagonal DPCIR normal matrices (`2K x 2K`).
    pub a_block: DMatrix<f64>,
    /// Diagonal of the binary weighting matrix (`2K`, entries 0 or 1).
    pub w_diag: DVector<f64>,
    /// Stacked SINR-scaled symbols `sigma_k sqrt(gamma_k) x_{m_k}` (`2K`).
    pub sigma_gamma_x: DVector<f64>,
    /// Set when `h_tilde` is numerically rank-deficient; the pseudo-inverse
    /// is still valid but identities that assume full row rank are not.
    pub degenerate: bool,
}

impl LiftedSystem {
    pub fn n_users(&self) -> usize {
        self.h_tilde.nrows() / 2
    }

    pub fn n_tx(&self) -> usize {
        self.h_tilde.ncols() / 2
    }
}

/// Standard-form NNLS data `min ||y - B delta||^2`, `delta >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NnlsProblem {
    /// `B = -H^+ A^(-1) W`, `2N x 2K`; weight-0 columns are exactly zero.
    pub b_matrix: DMatrix<f64>,
    /// `y = H^+ S G^(1/2) x`, the zero-forcing transmit vector.
    pub y_vector: DVector<f64>,
    pub lifted: LiftedSystem,
}

impl NnlsProblem {
    pub fn n_vars(&self) -> usize {
        self.b_matrix.ncols()
    }
}

/// Lift `instance` to real coordinates and stack the per-user constraints.
///
/// A rank-deficient `h_tilde` is flagged via [`LiftedSystem::degenerate`]
/// rather than rejected; the pseudo-inverse comes from a rank-revealing SVD
/// either way.
pub fn lift(instance: &SlpInstance) -> Result<LiftedSystem, Error> {
    let k = instance.n_users();
    let n = instance.n_tx();
    let mut h_tilde = DMatrix::zeros(2 * k, 2 * n);
    for (u, channel) in instance.channels.iter().enumerate() {
        for (j, g) in channel.gains.iter().enumerate() {
            h_tilde[(2 * u, j)] = g.re;
            h_tilde[(2 * u, n + j)] = -g.im;
            h_tilde[(2 * u + 1, j)] = g.im;
            h_tilde[(2 * u + 1, n + j)] = g.re;
        }
    }
    let pinv = linalg::pinv(&h_tilde);
    let degenerate = pinv.rank < 2 * k;

    let mut a_block = DMatrix::zeros(2 * k, 2 * k);
    let mut w_diag = DVector::zeros(2 * k);
    let mut sigma_gamma_x = DVector::zeros(2 * k);
    for u in 0..k {
        let m = instance.symbol_indices[u];
        let spec = dpcir(&instance.constellation, m)?;
        for r in 0..2 {
            for c in 0..2 {
                a_block[(2 * u + r, 2 * u + c)] = spec.a_matrix[(r, c)];
            }
            w_diag[2 * u + r] = if spec.weights[r] { 1.0 } else { 0.0 };
        }
        let scale = instance.noise_sigmas[u] * libm::sqrt(instance.sinr_targets[u]);
        let x = instance.constellation.points()[m].coords;
        sigma_gamma_x[2 * u] = scale * x.x;
        sigma_gamma_x[2 * u + 1] = scale * x.y;
    }

    Ok(LiftedSystem {
        h_tilde,
        h_pinv: pinv.matrix,
        a_block,
        w_diag,
        sigma_gamma_x,
        degenerate,
    })
}

/// Build the standard-form pair from a lifted system.
///
/// Weight-0 columns of `B` are written as structural zeros; the 2x2 blocks
/// of `A` are inverted in closed form.
pub fn assemble_nnls(lifted: LiftedSystem) -> NnlsProblem {
    let two_k = lifted.h_tilde.nrows();
    let two_n = lifted.h_tilde.ncols();
    let y_vector = &lifted.h_pinv * &lifted.sigma_gamma_x;
    let mut b_matrix = DMatrix::zeros(two_n, two_k);
    for j in 0..two_k {
        if lifted.w_diag[j] == 0.0 {
            continue;
        }
        let block = j / 2;
        let r = j % 2;
        let a = lifted.a_block.view((2 * block, 2 * block), (2, 2));
        let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
        // Column r of the adjugate inverse of the 2x2 block.
        let (v0, v1) = if r == 0 {
            (a[(1, 1)] / det, -a[(1, 0)] / det)
        } else {
            (-a[(0, 1)] / det, a[(0, 0)] / det)
        };
        let col0 = lifted.h_pinv.column(2 * block);
        let col1 = lifted.h_pinv.column(2 * block + 1);
        let mut out = b_matrix.column_mut(j);
        out.axpy(-v0, &col0, 0.0);
        out.axpy(-v1, &col1, 1.0);
    }
    NnlsProblem {
        b_matrix,
        y_vector,
        lifted,
    }
}
