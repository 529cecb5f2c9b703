//! Seeded Monte-Carlo harness: channel and symbol generation, per-trial
//! solves across solvers, grid sweeps, and optional wall-clock timing.
//!
//! Reproducibility contract: every trial owns a counter-based RNG substream
//! derived by hashing `(seed, modulation, K, N, gamma_db, trial)` with
//! SHA-256 into a ChaCha12 key. Records are therefore identical for a given
//! config regardless of how many worker threads execute the sweep. Timing
//! is off by default so that emitted records (and the CSVs built from them)
//! are byte-reproducible; enabling it fills `wall_ns` with genuinely
//! non-deterministic measurements.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use sha2::{Digest, Sha256};

use slp_core::nnls::Solver;
use slp_core::{
    assemble_nnls, ci_margins_ok, lift, recover_transmit, solve_apgd, solve_cf, solve_exact,
    solve_icf, solve_zf, Constellation, Error, NnlsProblem, NnlsSolution, SlpInstance,
    UserChannel,
};

/// Absolute tolerance for the constructive-interference margin check.
pub const MARGIN_TOLERANCE: f64 = 1e-9;

/// Warmup solves per (cell, solver) before any timed solve.
pub const TIMING_WARMUP: usize = 5;

/// `10^(dB/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Transmit-array sizing for a sweep: either a fixed antenna count or a
/// load factor `beta = N / K` applied per user count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Antennas {
    Fixed(usize),
    LoadFactor(f64),
}

impl Antennas {
    pub fn n_for(&self, k: usize) -> usize {
        match *self {
            Antennas::Fixed(n) => n,
            Antennas::LoadFactor(beta) => (beta * k as f64).round() as usize,
        }
    }
}

/// Grid definition for one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub modulations: Vec<String>,
    pub k_users: Vec<usize>,
    pub antennas: Antennas,
    pub gamma_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub solvers: Vec<Solver>,
    pub apgd_nmax: usize,
    /// Fill `wall_ns` with real measurements (breaks byte-reproducibility
    /// across runs; leave off for deterministic output).
    pub measure_timing: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.trials == 0 {
            return Err(Error::InvalidInstance("trials must be >= 1".into()));
        }
        if self.solvers.is_empty() {
            return Err(Error::InvalidInstance("no solvers requested".into()));
        }
        if self.modulations.is_empty() || self.k_users.is_empty() || self.gamma_db.is_empty() {
            return Err(Error::InvalidInstance("empty sweep grid".into()));
        }
        for label in &self.modulations {
            Constellation::from_label(label)?;
        }
        for &k in &self.k_users {
            let n = self.antennas.n_for(k);
            if k == 0 || k > n {
                return Err(Error::InvalidInstance(format!(
                    "grid point K = {k}, N = {n} violates 1 <= K <= N"
                )));
            }
        }
        Ok(())
    }
}

/// Grid coordinates attached to every record of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialCoordinates {
    pub modulation: String,
    pub k_users: usize,
    pub n_tx: usize,
    pub gamma_db: f64,
    pub trial: usize,
}

/// One (trial, solver) outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub solver: Solver,
    pub modulation: String,
    pub k_users: usize,
    pub n_tx: usize,
    pub gamma_db: f64,
    pub trial: usize,
    pub power_linear: f64,
    pub power_dbw: f64,
    /// Solve-only wall time; zero unless timing was requested.
    pub wall_ns: u64,
    pub iterations: usize,
    pub support_l1: usize,
    pub support_l2: usize,
    pub feasible: bool,
    pub degenerate: bool,
}

/// ChaCha12 substream for one trial, keyed by hashing the seed together
/// with the full grid coordinates.
pub fn substream(
    seed: u64,
    modulation: &str,
    k_users: usize,
    n_tx: usize,
    gamma_db: f64,
    trial: usize,
) -> ChaCha12Rng {
    let mut hasher = Sha256::new();
    hasher.update(b"slp-trial-v1");
    hasher.update(seed.to_le_bytes());
    hasher.update((modulation.len() as u64).to_le_bytes());
    hasher.update(modulation.as_bytes());
    hasher.update((k_users as u64).to_le_bytes());
    hasher.update((n_tx as u64).to_le_bytes());
    hasher.update(gamma_db.to_bits().to_le_bytes());
    hasher.update((trial as u64).to_le_bytes());
    ChaCha12Rng::from_seed(hasher.finalize().into())
}

/// Draw one instance: i.i.d. unit-variance circularly symmetric Gaussian
/// channel entries (real and imaginary parts each variance 1/2), uniform
/// symbol indices, unit noise, and a common linear SINR target.
pub fn draw_instance<R: Rng>(
    rng: &mut R,
    k_users: usize,
    n_tx: usize,
    constellation: &Constellation,
    gamma_linear: f64,
) -> SlpInstance {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let channels = (0..k_users)
        .map(|_| {
            UserChannel::new(
                (0..n_tx)
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(re * scale, im * scale)
                    })
                    .collect(),
            )
        })
        .collect();
    let symbols = (0..k_users)
        .map(|_| rng.random_range(0..constellation.order()))
        .collect();
    SlpInstance::new(
        channels,
        vec![1.0; k_users],
        vec![gamma_linear; k_users],
        symbols,
        constellation.clone(),
    )
    .expect("drawn instance is structurally valid")
}

/// Run one solver; an active-set iteration cap is folded into the returned
/// flag rather than aborting the trial.
pub fn run_solver(problem: &NnlsProblem, solver: Solver, apgd_nmax: usize) -> (NnlsSolution, bool) {
    match solver {
        Solver::Exact => match solve_exact(problem) {
            Ok(solution) => (solution, false),
            Err(Error::IterationCap { best, .. }) => (best, true),
            Err(other) => unreachable!("exact solver returned {other}"),
        },
        Solver::Apgd => (solve_apgd(problem, apgd_nmax), false),
        Solver::Cf => (solve_cf(problem), false),
        Solver::Icf => (solve_icf(problem), false),
        Solver::Zf => (solve_zf(problem), false),
    }
}

/// Assemble `instance` once and run every requested solver on it.
///
/// `support_l1`/`support_l2` are the candidate-support sizes where the
/// solver defines them (CF, ICF) and the final support size otherwise.
/// Degenerate channels tag the records; the trial is kept.
pub fn run_trial(
    instance: &SlpInstance,
    coords: &TrialCoordinates,
    solvers: &[Solver],
    apgd_nmax: usize,
    measure_timing: bool,
) -> Result<Vec<TrialRecord>, Error> {
    let lifted = lift(instance)?;
    let degenerate = lifted.degenerate;
    let problem = assemble_nnls(lifted);
    let mut records = Vec::with_capacity(solvers.len());
    for &solver in solvers {
        let (solution, capped, wall_ns) = if measure_timing {
            let started = Instant::now();
            let (solution, capped) = run_solver(&problem, solver, apgd_nmax);
            (solution, capped, started.elapsed().as_nanos() as u64)
        } else {
            let (solution, capped) = run_solver(&problem, solver, apgd_nmax);
            (solution, capped, 0)
        };
        let result = recover_transmit(&problem, &solution);
        let support_len = solution.support.len();
        records.push(TrialRecord {
            solver,
            modulation: coords.modulation.clone(),
            k_users: coords.k_users,
            n_tx: coords.n_tx,
            gamma_db: coords.gamma_db,
            trial: coords.trial,
            power_linear: result.power_linear,
            power_dbw: result.power_dbw,
            wall_ns,
            iterations: solution.iterations,
            support_l1: solution.support_l1().unwrap_or(support_len),
            support_l2: solution.support_l2().unwrap_or(support_len),
            feasible: ci_margins_ok(&result, MARGIN_TOLERANCE),
            degenerate: degenerate || capped,
        });
    }
    Ok(records)
}

/// Run the full Cartesian grid of `config` with `jobs` worker threads.
///
/// Records are ordered by (modulation, K, gamma) in config order, then
/// trial, then solver, independent of `jobs`.
pub fn sweep(config: &SweepConfig, jobs: usize) -> Result<Vec<TrialRecord>, Error> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("worker pool");
    let mut records = Vec::new();
    for modulation in &config.modulations {
        let constellation = Constellation::from_label(modulation)?;
        for &k_users in &config.k_users {
            let n_tx = config.antennas.n_for(k_users);
            for &gamma_db in &config.gamma_db {
                let gamma_linear = db_to_linear(gamma_db);
                if config.measure_timing {
                    warm_up_cell(
                        config,
                        modulation,
                        &constellation,
                        k_users,
                        n_tx,
                        gamma_db,
                        gamma_linear,
                    )?;
                }
                let cell: Result<Vec<Vec<TrialRecord>>, Error> = pool.install(|| {
                    (0..config.trials)
                        .into_par_iter()
                        .map(|trial| {
                            let mut rng = substream(
                                config.seed, modulation, k_users, n_tx, gamma_db, trial,
                            );
                            let instance = draw_instance(
                                &mut rng, k_users, n_tx, &constellation, gamma_linear,
                            );
                            let coords = TrialCoordinates {
                                modulation: modulation.clone(),
                                k_users,
                                n_tx,
                                gamma_db,
                                trial,
                            };
                            run_trial(
                                &instance,
                                &coords,
                                &config.solvers,
                                config.apgd_nmax,
                                config.measure_timing,
                            )
                        })
                        .collect()
                });
                for trial_records in cell? {
                    records.extend(trial_records);
                }
            }
        }
    }
    Ok(records)
}

/// Untimed solves of every solver on the cell's first instance, so that
/// timed medians are not skewed by cold caches.
#[allow(clippy::too_many_arguments)]
fn warm_up_cell(
    config: &SweepConfig,
    modulation: &str,
    constellation: &Constellation,
    k_users: usize,
    n_tx: usize,
    gamma_db: f64,
    gamma_linear: f64,
) -> Result<(), Error> {
    let mut rng = substream(config.seed, modulation, k_users, n_tx, gamma_db, 0);
    let instance = draw_instance(&mut rng, k_users, n_tx, constellation, gamma_linear);
    let problem = assemble_nnls(lift(&instance)?);
    for _ in 0..TIMING_WARMUP {
        for &solver in &config.solvers {
            let _ = run_solver(&problem, solver, config.apgd_nmax);
        }
    }
    Ok(())
}

/// Per-cell aggregate, in first-appearance order of the raw records.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRecord {
    pub solver: Solver,
    pub modulation: String,
    pub k_users: usize,
    pub n_tx: usize,
    pub gamma_db: f64,
    /// `10 log10` of the mean linear power (never a mean of dB values).
    pub mean_power_dbw: f64,
    /// Lower median of the solve-only wall times.
    pub median_wall_ns: u64,
    pub trials: usize,
}

/// Group records by (solver, modulation, K, N, gamma) and aggregate:
/// powers are averaged in the linear domain and then converted, wall times
/// reduce to the lower median.
pub fn aggregate(records: &[TrialRecord]) -> Vec<AggregateRecord> {
    type Key<'a> = (Solver, &'a str, usize, usize, u64);
    let mut groups: Vec<(Key<'_>, Vec<&TrialRecord>)> = Vec::new();
    for record in records {
        let key = (
            record.solver,
            record.modulation.as_str(),
            record.k_users,
            record.n_tx,
            record.gamma_db.to_bits(),
        );
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(record),
            None => groups.push((key, vec![record])),
        }
    }
    groups
        .into_iter()
        .map(|(_, members)| {
            let trials = members.len();
            let mean_linear: f64 =
                members.iter().map(|r| r.power_linear).sum::<f64>() / trials as f64;
            let mut walls: Vec<u64> = members.iter().map(|r| r.wall_ns).collect();
            walls.sort_unstable();
            let first = members[0];
            AggregateRecord {
                solver: first.solver,
                modulation: first.modulation.clone(),
                k_users: first.k_users,
                n_tx: first.n_tx,
                gamma_db: first.gamma_db,
                mean_power_dbw: 10.0 * mean_linear.log10(),
                median_wall_ns: walls[(walls.len() - 1) / 2],
                trials,
            }
        })
        .collect()
}
