//! Solver correctness against independent oracles: exhaustive support
//! enumeration on small problems, a long-run gradient method on benchmark
//! shapes, and the support-optimality conditions.

mod common;

use common::{draw_problem, synthetic_problem};
use nalgebra::{DMatrix, DVector};
use slp_core::nnls::{self, Solver};
use slp_core::{
    solve_apgd, solve_cf, solve_exact, solve_icf, solve_zf, verify_support, Error, NnlsProblem,
};

/// Independent oracle: enumerate every support over the nonzero columns,
/// solve the restricted normal equations by Cholesky, and keep the best
/// objective among non-negative restricted solutions. The optimal support
/// is one of the enumerated subsets, so this equals the NNLS optimum.
fn enumeration_oracle(problem: &NnlsProblem) -> f64 {
    let b = &problem.b_matrix;
    let y = &problem.y_vector;
    let active: Vec<usize> = (0..b.ncols())
        .filter(|&j| problem.lifted.w_diag[j] == 1.0)
        .collect();
    assert!(active.len() <= 16, "oracle is exponential in the column count");
    let mut best = y.norm_squared();
    for mask in 1u32..(1 << active.len()) {
        let support: Vec<usize> = active
            .iter()
            .enumerate()
            .filter(|&(p, _)| mask & (1 << p) != 0)
            .map(|(_, &j)| j)
            .collect();
        let mut b_sub = DMatrix::zeros(b.nrows(), support.len());
        for (c, &j) in support.iter().enumerate() {
            b_sub.set_column(c, &b.column(j));
        }
        let normal = b_sub.transpose() * &b_sub;
        let rhs = b_sub.transpose() * y;
        let Some(chol) = normal.cholesky() else {
            continue;
        };
        let z = chol.solve(&rhs);
        if z.iter().any(|&v| v < 0.0) {
            continue;
        }
        let objective = (y - &b_sub * z).norm_squared();
        if objective < best {
            best = objective;
        }
    }
    best
}

#[test]
fn exact_separable_clamp() {
    let problem = synthetic_problem(
        DMatrix::identity(2, 2),
        DVector::from_row_slice(&[1.0, -1.0]),
    );
    let solution = solve_exact(&problem).unwrap();
    assert!((solution.delta[0] - 1.0).abs() < 1e-12);
    assert_eq!(solution.delta[1], 0.0);
    assert!((solution.objective - 1.0).abs() < 1e-12);
    assert_eq!(solution.support, vec![0]);
}

#[test]
fn all_solvers_return_zero_on_zero_y() {
    let problem = draw_problem(3, 4, 4, "psk4", 4.0);
    let zeroed = NnlsProblem {
        y_vector: DVector::zeros(problem.y_vector.len()),
        ..problem
    };
    for solution in [
        solve_exact(&zeroed).unwrap(),
        solve_apgd(&zeroed, 50),
        solve_cf(&zeroed),
        solve_icf(&zeroed),
        solve_zf(&zeroed),
    ] {
        assert_eq!(solution.delta.norm(), 0.0, "{}", solution.solver);
        assert_eq!(solution.objective, 0.0, "{}", solution.solver);
        assert!(solution.support.is_empty());
    }
}

#[test]
fn apgd_zero_iterations_is_zero_forcing() {
    let problem = draw_problem(11, 8, 8, "psk4", 4.0);
    let solution = solve_apgd(&problem, 0);
    assert_eq!(solution.delta.norm(), 0.0);
    assert_eq!(solution.iterations, 0);
    assert!((solution.objective - problem.y_vector.norm_squared()).abs() < 1e-12);
    assert_eq!(solution.objective, solve_zf(&problem).objective);
}

#[test]
fn apgd_identity_fixed_point() {
    let y = DVector::from_row_slice(&[0.3, 1.2, 0.0, 2.0]);
    let problem = synthetic_problem(DMatrix::identity(4, 4), y.clone());
    let solution = solve_apgd(&problem, 2000);
    assert!((solution.delta - y).norm() < 1e-6);
}

#[test]
fn exact_matches_enumeration_on_small_instances() {
    for (k, n, label) in [(1, 1, "psk4"), (1, 2, "psk8"), (2, 2, "psk4"), (2, 3, "qam16")] {
        for seed in 0..25u64 {
            let problem = draw_problem(seed * 7 + 1, k, n, label, 5.0);
            let exact = solve_exact(&problem).unwrap();
            let oracle = enumeration_oracle(&problem);
            let scale = oracle.max(1.0);
            assert!(
                (exact.objective - oracle).abs() <= 1e-9 * scale,
                "seed {seed} {label} K={k} N={n}: exact {} vs oracle {oracle}",
                exact.objective
            );
        }
    }
}

#[test]
fn exact_matches_long_apgd_on_benchmark_shape() {
    for seed in 1..=8u64 {
        let problem = draw_problem(seed, 8, 8, "psk4", 4.0);
        let exact = solve_exact(&problem).unwrap();
        let apgd = solve_apgd(&problem, 10_000);
        let scale = exact.objective.max(1e-30);
        assert!(
            (apgd.objective - exact.objective).abs() <= 1e-6 * scale,
            "seed {seed}: exact {} apgd {}",
            exact.objective,
            apgd.objective
        );
    }
}

#[test]
fn exact_kkt_residual_is_tiny() {
    for seed in 0..20u64 {
        let problem = draw_problem(seed, 6, 8, "qam16", 8.0);
        let exact = solve_exact(&problem).unwrap();
        let grad_scale = (problem.b_matrix.transpose() * &problem.y_vector).amax();
        assert!(
            exact.kkt_residual(&problem) <= 1e-9 * grad_scale.max(1e-300),
            "seed {seed}"
        );
    }
}

#[test]
fn apgd_reaches_milli_accuracy_quickly() {
    for seed in [2u64, 5, 9] {
        let problem = draw_problem(seed, 8, 8, "psk4", 4.0);
        let exact = solve_exact(&problem).unwrap();
        let apgd = solve_apgd(&problem, 150);
        assert!(
            apgd.objective - exact.objective <= 1e-3,
            "seed {seed}: gap {}",
            apgd.objective - exact.objective
        );
    }
}

#[test]
fn cf_clamps_negative_entries_and_pays_for_it() {
    // Search seeded instances for one where the restricted solve on the
    // initial estimate goes negative; there the plain closed form clamps
    // and lands strictly above the optimum.
    let mut found = false;
    for seed in 0..200u64 {
        let problem = draw_problem(seed, 8, 8, "psk4", 4.0);
        let cf = solve_cf(&problem);
        let icf = solve_icf(&problem);
        let pruned = icf.support_l1().unwrap() > icf.support_l2().unwrap();
        if !pruned {
            continue;
        }
        found = true;
        let exact = solve_exact(&problem).unwrap();
        assert!(cf.objective > exact.objective + 1e-9 * exact.objective.max(1.0), "seed {seed}");
        break;
    }
    assert!(found, "no instance with a pruned support in the search budget");
}

#[test]
fn icf_matches_exact_whenever_certified() {
    let mut certified = 0usize;
    for seed in 0..60u64 {
        let problem = draw_problem(seed, 8, 8, "psk4", 6.0);
        let icf = solve_icf(&problem);
        let validated = icf.validated_support.clone().unwrap();
        if validated.is_empty() {
            continue;
        }
        let check = verify_support(&problem, &validated).unwrap();
        if !check.certifies() {
            continue;
        }
        certified += 1;
        let exact = solve_exact(&problem).unwrap();
        let gap = (&icf.delta - &exact.delta).amax();
        assert!(gap <= 1e-9, "seed {seed}: certified but deltas differ by {gap}");
    }
    assert!(certified >= 10, "only {certified} certified instances; test is too weak");
}

#[test]
fn exact_support_passes_both_conditions() {
    let mut checked = 0usize;
    for seed in 0..30u64 {
        let problem = draw_problem(seed, 8, 8, "psk4", 4.0);
        let exact = solve_exact(&problem).unwrap();
        if exact.support.is_empty() {
            continue;
        }
        let check = verify_support(&problem, &exact.support).unwrap();
        assert!(check.c1_holds, "seed {seed}: C1 failed on the optimal support");
        assert!(check.c2_holds, "seed {seed}: C2 failed on the optimal support");
        checked += 1;
    }
    assert!(checked >= 20);
}

#[test]
fn padding_the_exact_support_breaks_a_condition() {
    let mut c1_failures = 0usize;
    for seed in 0..40u64 {
        let problem = draw_problem(seed, 8, 8, "psk4", 4.0);
        let exact = solve_exact(&problem).unwrap();
        let extra = (0..problem.n_vars()).find(|&j| {
            problem.lifted.w_diag[j] == 1.0 && !exact.support.contains(&j)
        });
        let Some(extra) = extra else { continue };
        let mut padded = exact.support.clone();
        padded.push(extra);
        let check = verify_support(&problem, &padded).unwrap();
        assert!(
            !check.certifies(),
            "seed {seed}: a strict superset of the optimal support cannot certify"
        );
        if !check.c1_holds {
            c1_failures += 1;
        }
    }
    assert!(c1_failures > 0, "expected at least one padded support to fail C1");
}

#[test]
fn empty_candidate_with_nonpositive_correlations() {
    // Identity channel, K = N = 1, QPSK: B^T y = (-1/2, -1/2), so the
    // origin is optimal and the empty support certifies it.
    let problem = draw_identity_qpsk_problem();
    let grad = problem.b_matrix.transpose() * &problem.y_vector;
    assert!(grad.iter().all(|&g| g < 0.0));
    let check = verify_support(&problem, &[]).unwrap();
    assert!(check.c1_holds && check.c2_holds);
    assert_eq!(check.min_c1_value, f64::INFINITY);
    assert!(check.max_c2_value < 0.0);
    let exact = solve_exact(&problem).unwrap();
    assert_eq!(exact.delta.norm(), 0.0);
}

fn draw_identity_qpsk_problem() -> NnlsProblem {
    use num_complex::Complex64;
    use slp_core::{assemble_nnls, lift, Constellation, SlpInstance, UserChannel};
    let c = Constellation::from_label("psk4").unwrap();
    let instance = SlpInstance::new(
        vec![UserChannel::new(vec![Complex64::new(1.0, 0.0)])],
        vec![1.0],
        vec![1.0],
        vec![0],
        c,
    )
    .unwrap();
    assemble_nnls(lift(&instance).unwrap())
}

#[test]
fn dependent_candidates_are_rejected() {
    let problem = draw_problem(1, 4, 4, "psk4", 4.0);
    assert!(matches!(
        verify_support(&problem, &[0, 0]),
        Err(Error::DependentSupport { .. })
    ));
    assert!(matches!(
        verify_support(&problem, &[99]),
        Err(Error::InvalidInstance(_))
    ));

    // A zero-weight column is identically zero, hence dependent.
    let mut qam = None;
    for seed in 0..50u64 {
        let p = draw_problem(seed, 4, 4, "qam16", 10.0);
        if p.lifted.w_diag.iter().any(|&w| w == 0.0) {
            qam = Some(p);
            break;
        }
    }
    let qam = qam.expect("some 16QAM draw contains an interior symbol");
    let zero_col = (0..qam.n_vars()).find(|&j| qam.lifted.w_diag[j] == 0.0).unwrap();
    assert!(matches!(
        verify_support(&qam, &[zero_col]),
        Err(Error::DependentSupport { .. })
    ));
}

#[test]
fn sandwich_nesting_and_sign_invariants_hold_on_batches() {
    for label in ["psk4", "qam16"] {
        for k in [2usize, 4, 8] {
            for seed in 0..15u64 {
                let problem = draw_problem(seed * 31 + k as u64, k, k, label, 6.0);
                let exact = solve_exact(&problem).unwrap();
                let others = [
                    solve_apgd(&problem, 25),
                    solve_cf(&problem),
                    solve_icf(&problem),
                    solve_zf(&problem),
                ];
                let slack = 1e-9 * exact.objective.max(1.0);
                for s in others.iter().chain([&exact]) {
                    assert!(
                        exact.objective <= s.objective + slack,
                        "{label} K={k} seed {seed}: {} beat exact",
                        s.solver
                    );
                    assert!(s.delta.iter().all(|&d| d >= 0.0));
                    for j in 0..problem.n_vars() {
                        if problem.lifted.w_diag[j] == 0.0 {
                            assert_eq!(s.delta[j], 0.0, "{} weight-0 leak", s.solver);
                        }
                    }
                    let recomputed = nnls::objective(&problem, &s.delta);
                    assert!(
                        (recomputed - s.objective).abs() <= 1e-10 * recomputed.max(1.0),
                        "{} stored objective drifted",
                        s.solver
                    );
                }
                let icf = &others[2];
                let l1_set = icf.initial_support.as_ref().unwrap();
                let l2_set = icf.validated_support.as_ref().unwrap();
                assert!(l2_set.iter().all(|j| l1_set.contains(j)), "nesting violated");
                assert!(l2_set.len() <= l1_set.len());
                assert!(l1_set.len() <= problem.n_vars());
                assert!(l1_set.iter().all(|&j| problem.lifted.w_diag[j] == 1.0));
            }
        }
    }
}

#[test]
fn solvers_are_deterministic() {
    let problem = draw_problem(17, 8, 8, "qam16", 14.0);
    let first = [
        solve_exact(&problem).unwrap().delta,
        solve_apgd(&problem, 25).delta,
        solve_cf(&problem).delta,
        solve_icf(&problem).delta,
    ];
    let second = [
        solve_exact(&problem).unwrap().delta,
        solve_apgd(&problem, 25).delta,
        solve_cf(&problem).delta,
        solve_icf(&problem).delta,
    ];
    for (a, b) in first.iter().zip(&second) {
        assert_eq!(a, b);
    }
}

#[test]
fn solver_tags_round_trip() {
    for s in Solver::ALL {
        assert_eq!(s.as_str().parse::<Solver>().unwrap(), s);
    }
    assert!("fastest".parse::<Solver>().is_err());
}
