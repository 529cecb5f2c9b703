//! Shared helpers for the solver test suites: seeded instance generation
//! and synthetic NNLS problems with hand-picked `(B, y)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use slp_core::{assemble_nnls, lift, Constellation, NnlsProblem, SlpInstance, UserChannel};

/// Standard normal via Box-Muller; deterministic for a given stream.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
}

/// Unit-variance circularly symmetric complex Gaussian entry.
pub fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    Complex64::new(standard_normal(rng) * s, standard_normal(rng) * s)
}

/// Seeded instance with i.i.d. Gaussian channels, uniform symbols, unit
/// noise, and a common SINR target given in dB.
pub fn draw_instance(seed: u64, k: usize, n: usize, label: &str, gamma_db: f64) -> SlpInstance {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let constellation = Constellation::from_label(label).unwrap();
    let gamma = 10f64.powf(gamma_db / 10.0);
    let channels = (0..k)
        .map(|_| UserChannel::new((0..n).map(|_| complex_gaussian(&mut rng)).collect()))
        .collect();
    let symbols = (0..k).map(|_| rng.random_range(0..constellation.order())).collect();
    SlpInstance::new(channels, vec![1.0; k], vec![gamma; k], symbols, constellation).unwrap()
}

/// Seeded standard-form problem for the common benchmark shape.
pub fn draw_problem(seed: u64, k: usize, n: usize, label: &str, gamma_db: f64) -> NnlsProblem {
    assemble_nnls(lift(&draw_instance(seed, k, n, label, gamma_db)).unwrap())
}

/// Wrap a hand-picked `(B, y)` as an [`NnlsProblem`]; the lifted part is a
/// consistent identity-channel stand-in whose weight diagonal marks the
/// nonzero columns of `B`.
pub fn synthetic_problem(b: DMatrix<f64>, y: DVector<f64>) -> NnlsProblem {
    let two_n = b.nrows();
    let two_k = b.ncols();
    assert_eq!(two_n, y.len());
    let w_diag = DVector::from_fn(two_k, |j, _| if b.column(j).norm() > 0.0 { 1.0 } else { 0.0 });
    let lifted = slp_core::LiftedSystem {
        h_tilde: DMatrix::identity(two_k, two_n),
        h_pinv: DMatrix::identity(two_n, two_k),
        a_block: DMatrix::identity(two_k, two_k),
        w_diag,
        sigma_gamma_x: DVector::zeros(two_k),
        degenerate: false,
    };
    NnlsProblem {
        b_matrix: b,
        y_vector: y,
        lifted,
    }
}
