//! Hard invariant suite over a seeded batch of instances.
//!
//! Every instance is drawn from the same substream scheme as the sweep
//! harness, so a violation is reproducible from `(seed, coordinates,
//! trial)`. The suite runs all five solvers per instance and checks:
//! power identity, CI margins, support nesting, certified support recovery
//! against the exact minimizer, optimality of the origin when no column
//! correlates positively with `y`, the weight mask on every solution, and
//! agreement of the exact solver with a long-run gradient oracle.

use slp_core::nnls;
use slp_core::{
    assemble_nnls, ci_margins_ok, lift, recover_transmit, solve_apgd, solve_cf, solve_exact,
    solve_icf, solve_zf, verify_support, Constellation, Error, NnlsProblem, NnlsSolution,
};

use crate::sim::{self, MARGIN_TOLERANCE};

#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub seed: u64,
    pub batch: usize,
    pub k_users: usize,
    pub n_tx: usize,
    pub modulation: String,
    pub gamma_db: f64,
    pub apgd_nmax: usize,
    /// Iteration budget of the long-run gradient oracle.
    pub oracle_iterations: usize,
}

impl CheckConfig {
    pub fn new(seed: u64, batch: usize, k_users: usize, n_tx: usize, modulation: &str, gamma_db: f64) -> Self {
        CheckConfig {
            seed,
            batch,
            k_users,
            n_tx,
            modulation: modulation.to_string(),
            gamma_db,
            apgd_nmax: 25,
            oracle_iterations: 10_000,
        }
    }
}

/// Outcome counters for one invariant.
#[derive(Debug, Clone)]
pub struct InvariantTally {
    pub name: &'static str,
    pub checked: usize,
    pub violations: usize,
    /// Trial index of the first violation (the instance is reproducible
    /// from the config seed plus this index).
    pub first_failure: Option<usize>,
}

impl InvariantTally {
    fn new(name: &'static str) -> Self {
        InvariantTally {
            name,
            checked: 0,
            violations: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, trial: usize, ok: bool) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            self.first_failure.get_or_insert(trial);
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub tallies: Vec<InvariantTally>,
    pub degenerate_trials: usize,
    pub batch: usize,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.tallies.iter().all(|t| t.violations == 0)
    }
}

/// Candidate-support consistency for one solution: nesting of the
/// validated estimate in the initial one, size bounds, the weight mask on
/// candidates, and containment of the final support.
pub fn support_nesting_violation(
    problem: &NnlsProblem,
    solution: &NnlsSolution,
) -> Option<String> {
    let n_vars = problem.n_vars();
    if let Some(initial) = &solution.initial_support {
        if initial.len() > n_vars {
            return Some(format!("L1 = {} exceeds 2K = {n_vars}", initial.len()));
        }
        if let Some(&j) = initial.iter().find(|&&j| problem.lifted.w_diag[j] == 0.0) {
            return Some(format!("initial support contains weight-0 column {j}"));
        }
        if let Some(validated) = &solution.validated_support {
            if validated.len() > initial.len() {
                return Some(format!(
                    "L2 = {} exceeds L1 = {}",
                    validated.len(),
                    initial.len()
                ));
            }
            if let Some(&j) = validated.iter().find(|j| !initial.contains(j)) {
                return Some(format!("validated support gained column {j}"));
            }
        }
        let tightest = solution.validated_support.as_ref().unwrap_or(initial);
        if let Some(&j) = solution.support.iter().find(|j| !tightest.contains(j)) {
            return Some(format!("final support leaked column {j}"));
        }
    }
    None
}

/// Run the suite; errors only on setup problems (bad modulation label or
/// grid), never on invariant violations, which are tallied in the report.
pub fn run_check(config: &CheckConfig) -> Result<CheckReport, Error> {
    let constellation = Constellation::from_label(&config.modulation)?;
    if config.k_users == 0 || config.k_users > config.n_tx {
        return Err(Error::InvalidInstance(format!(
            "K = {} and N = {} violate 1 <= K <= N",
            config.k_users, config.n_tx
        )));
    }
    if config.batch == 0 {
        return Err(Error::InvalidInstance("batch must be >= 1".into()));
    }

    let mut power_identity = InvariantTally::new("power-identity");
    let mut margins = InvariantTally::new("ci-margins");
    let mut nesting = InvariantTally::new("support-nesting");
    let mut recovery = InvariantTally::new("lemma2-recovery");
    let mut origin = InvariantTally::new("origin-kkt");
    let mut weight_mask = InvariantTally::new("weight-mask");
    let mut oracle = InvariantTally::new("oracle-equivalence");
    let mut degenerate_trials = 0usize;

    let gamma_linear = sim::db_to_linear(config.gamma_db);
    for trial in 0..config.batch {
        let mut rng = sim::substream(
            config.seed,
            &config.modulation,
            config.k_users,
            config.n_tx,
            config.gamma_db,
            trial,
        );
        let instance = sim::draw_instance(
            &mut rng,
            config.k_users,
            config.n_tx,
            &constellation,
            gamma_linear,
        );
        let lifted = lift(&instance)?;
        let degenerate = lifted.degenerate;
        if degenerate {
            degenerate_trials += 1;
        }
        let problem = assemble_nnls(lifted);

        let exact = match solve_exact(&problem) {
            Ok(solution) => solution,
            Err(Error::IterationCap { best, .. }) => {
                degenerate_trials += 1;
                best
            }
            Err(other) => return Err(other),
        };
        let apgd = solve_apgd(&problem, config.apgd_nmax);
        let cf = solve_cf(&problem);
        let icf = solve_icf(&problem);
        let zf = solve_zf(&problem);
        let all = [&exact, &apgd, &cf, &icf, &zf];

        // (a) power identity, every solver.
        let mut identity_ok = true;
        for solution in all {
            let result = recover_transmit(&problem, solution);
            let scale = result.power_linear.max(1.0);
            identity_ok &= (result.power_linear - solution.objective).abs() <= 1e-9 * scale;
            // (b) margins, nondegenerate instances only.
            if !degenerate {
                margins.record(trial, ci_margins_ok(&result, MARGIN_TOLERANCE));
            }
        }
        power_identity.record(trial, identity_ok);

        // Solutions respect the weight mask and non-negativity.
        let mask_ok = all.iter().all(|s| {
            s.delta.iter().all(|&d| d >= 0.0)
                && (0..problem.n_vars())
                    .all(|j| problem.lifted.w_diag[j] == 1.0 || s.delta[j] == 0.0)
        });
        weight_mask.record(trial, mask_ok);

        // (c) support nesting for the closed-form routes.
        let nesting_ok = support_nesting_violation(&problem, &cf).is_none()
            && support_nesting_violation(&problem, &icf).is_none();
        nesting.record(trial, nesting_ok);

        // (d) certified supports reproduce the exact minimizer.
        if let Some(validated) = &icf.validated_support {
            if !validated.is_empty() {
                if let Ok(check) = verify_support(&problem, validated) {
                    if check.certifies() {
                        let gap = (&icf.delta - &exact.delta).amax();
                        recovery.record(trial, gap <= 1e-9);
                    }
                }
            }
        }

        // (e) non-positive correlations make the origin optimal for every
        // route that is allowed to move.
        let correlations = problem.b_matrix.transpose() * &problem.y_vector;
        if correlations.iter().all(|&d| d <= 0.0) {
            let all_zero = [&exact, &apgd, &cf, &icf]
                .iter()
                .all(|s| s.delta.iter().all(|&d| d == 0.0));
            origin.record(trial, all_zero);
        }

        // Long-run gradient oracle agrees with the active-set optimum.
        let oracle_solution = solve_apgd(&problem, config.oracle_iterations);
        let scale = exact.objective.max(1e-12);
        oracle.record(
            trial,
            (oracle_solution.objective - exact.objective).abs() <= 1e-6 * scale,
        );

        // The stored objective must match a recomputation.
        let stored_ok = all.iter().all(|s| {
            (nnls::objective(&problem, &s.delta) - s.objective).abs()
                <= 1e-10 * s.objective.max(1.0)
        });
        if !stored_ok {
            power_identity.record(trial, false);
        }
    }

    Ok(CheckReport {
        tallies: vec![
            power_identity,
            margins,
            nesting,
            recovery,
            origin,
            weight_mask,
            oracle,
        ],
        degenerate_trials,
        batch: config.batch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_batches_pass() {
        for (label, k) in [("psk4", 4), ("qam16", 4)] {
            let config = CheckConfig {
                batch: 20,
                oracle_iterations: 4000,
                ..CheckConfig::new(7, 20, k, k, label, 6.0)
            };
            let report = run_check(&config).unwrap();
            assert!(report.passed(), "{label}: {:?}", report.tallies);
            assert!(report.tallies.iter().any(|t| t.checked > 0));
        }
    }

    #[test]
    fn all_interior_batch_exercises_zero_b() {
        // Force every user onto an interior 16QAM point: B = 0, delta = 0
        // everywhere, and the whole suite still passes.
        let c = Constellation::from_label("qam16").unwrap();
        let interior: Vec<usize> = c
            .points()
            .iter()
            .filter(|p| p.kind == slp_core::PointKind::Interior)
            .map(|p| p.index)
            .collect();
        let mut rng = sim::substream(3, "qam16", 3, 4, 6.0, 0);
        let mut instance = sim::draw_instance(&mut rng, 3, 4, &c, sim::db_to_linear(6.0));
        for (i, m) in instance.symbol_indices.iter_mut().enumerate() {
            *m = interior[i % interior.len()];
        }
        let problem = assemble_nnls(lift(&instance).unwrap());
        assert_eq!(problem.b_matrix.norm(), 0.0);
        for solution in [
            solve_exact(&problem).unwrap(),
            solve_apgd(&problem, 25),
            solve_cf(&problem),
            solve_icf(&problem),
        ] {
            assert_eq!(solution.delta.norm(), 0.0);
            assert!(support_nesting_violation(&problem, &solution).is_none());
        }
    }

    #[test]
    fn corrupted_support_estimate_is_caught() {
        // Canary for the nesting check: a sign-flipped strict tolerance
        // would admit zero-weight columns (their correlations are exactly
        // zero) into the initial estimate. Doctor a real solution that way
        // and the check must fire.
        let c = Constellation::from_label("qam16").unwrap();
        let mut found = false;
        for trial in 0..50 {
            let mut rng = sim::substream(5, "qam16", 4, 4, 10.0, trial);
            let instance = sim::draw_instance(&mut rng, 4, 4, &c, sim::db_to_linear(10.0));
            let problem = assemble_nnls(lift(&instance).unwrap());
            let Some(zero_col) =
                (0..problem.n_vars()).find(|&j| problem.lifted.w_diag[j] == 0.0)
            else {
                continue;
            };
            let mut icf = solve_icf(&problem);
            assert!(support_nesting_violation(&problem, &icf).is_none());
            icf.initial_support.as_mut().unwrap().push(zero_col);
            assert!(support_nesting_violation(&problem, &icf).is_some());
            found = true;
            break;
        }
        assert!(found, "no 16QAM draw with an interior symbol in 50 trials");
    }

    #[test]
    fn setup_errors_are_reported() {
        assert!(run_check(&CheckConfig::new(1, 10, 4, 2, "psk4", 4.0)).is_err());
        assert!(run_check(&CheckConfig::new(1, 10, 2, 2, "psk7x", 4.0)).is_err());
        assert!(run_check(&CheckConfig::new(1, 0, 2, 2, "psk4", 4.0)).is_err());
    }
}
