//! `slp`: single-instance solves, Monte-Carlo sweeps, and invariant checks
//! for NNLS-based symbol-level precoding.
//!
//! Exit codes: 0 success, 1 runtime failure (infeasible solution, failed
//! invariant, unwritable output), 2 flag or configuration errors.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use slp_cli::check::{run_check, CheckConfig};
use slp_cli::config::{self, parse_sweep_config};
use slp_cli::csvout;
use slp_cli::sim::{
    aggregate, db_to_linear, draw_instance, run_solver, substream, sweep, Antennas,
    SweepConfig, MARGIN_TOLERANCE,
};
use slp_core::nnls::Solver;
use slp_core::{assemble_nnls, lift, recover_transmit, verify_support, Constellation};

#[derive(Parser)]
#[command(name = "slp", version, about = "SINR-constrained power-minimization symbol-level precoding via NNLS")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one seeded instance and report every requested solver.
    Solve(SolveArgs),
    /// Run a Monte-Carlo grid and write raw + aggregate CSVs.
    Sweep(SweepArgs),
    /// Run the hard invariant suite on a seeded batch.
    Check(CheckArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Number of users K.
    #[arg(long)]
    k: usize,
    /// Number of transmit antennas N (K <= N).
    #[arg(long)]
    n: usize,
    /// Modulation label, e.g. psk4, psk8, qam16.
    #[arg(long = "mod", default_value = "psk4")]
    modulation: String,
    /// Target SINR in dB (equal for all users; sigma_k = 1).
    #[arg(long = "gamma-db", default_value_t = 4.0)]
    gamma_db: f64,
    #[arg(long, env = "SLP_SEED", default_value_t = config::DEFAULT_SEED)]
    seed: u64,
    /// Solver to run (repeatable); defaults to all five.
    #[arg(long = "solver", value_delimiter = ',')]
    solver: Vec<Solver>,
    /// APGD iteration budget.
    #[arg(long, default_value_t = config::DEFAULT_NMAX)]
    nmax: usize,
}

#[derive(Args)]
struct SweepArgs {
    /// Preset grid: fig1 (power vs SINR, N=K=8) or fig2 (power vs users,
    /// beta=6/5).
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Flat key-value config file describing the grid.
    #[arg(long)]
    config: Option<PathBuf>,
    /// User counts K (comma separated).
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    /// Fixed antenna count N.
    #[arg(long, conflicts_with = "beta")]
    n: Option<usize>,
    /// Load factor beta = N/K (accepts 1.2 or 6/5).
    #[arg(long)]
    beta: Option<String>,
    /// Modulation labels (comma separated).
    #[arg(long = "mod", value_delimiter = ',')]
    modulation: Vec<String>,
    /// SINR grid in dB (comma separated).
    #[arg(long = "gamma-db", value_delimiter = ',')]
    gamma_db: Vec<f64>,
    /// Trials per grid cell.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, env = "SLP_SEED")]
    seed: Option<u64>,
    /// Solver to run (repeatable); defaults to all five.
    #[arg(long = "solver", value_delimiter = ',')]
    solver: Vec<Solver>,
    /// APGD iteration budget.
    #[arg(long)]
    nmax: Option<usize>,
    /// Output directory for raw.csv and aggregate.csv.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; output bytes do not depend on this.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Measure solve-only wall time (fills wall_ns; output is then no
    /// longer byte-reproducible across runs).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, env = "SLP_SEED", default_value_t = config::DEFAULT_SEED)]
    seed: u64,
    /// Instances per batch.
    #[arg(long, default_value_t = 100)]
    batch: usize,
    #[arg(long, default_value_t = 8)]
    k: usize,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long = "mod", default_value = "psk4")]
    modulation: String,
    #[arg(long = "gamma-db", default_value_t = 4.0)]
    gamma_db: f64,
    #[arg(long, default_value_t = config::DEFAULT_NMAX)]
    nmax: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Check(args) => cmd_check(args),
    };
    ExitCode::from(code)
}

fn cmd_solve(args: SolveArgs) -> u8 {
    if args.k == 0 || args.k > args.n {
        eprintln!("error: need 1 <= K <= N, got K = {}, N = {}", args.k, args.n);
        return 2;
    }
    let constellation = match Constellation::from_label(&args.modulation) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let solvers = if args.solver.is_empty() {
        Solver::ALL.to_vec()
    } else {
        args.solver.clone()
    };

    let mut rng = substream(args.seed, &args.modulation, args.k, args.n, args.gamma_db, 0);
    let instance = draw_instance(
        &mut rng,
        args.k,
        args.n,
        &constellation,
        db_to_linear(args.gamma_db),
    );
    let lifted = match lift(&instance) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let degenerate = lifted.degenerate;
    let problem = assemble_nnls(lifted);

    println!(
        "instance: mod={} K={} N={} gamma={} dB seed={} degenerate={}",
        args.modulation, args.k, args.n, args.gamma_db, args.seed, degenerate
    );
    let mut all_feasible = true;
    let mut icf_validated: Option<Vec<usize>> = None;
    for &solver in &solvers {
        let (solution, capped) = run_solver(&problem, solver, args.nmax);
        let result = recover_transmit(&problem, &solution);
        let feasible = slp_core::ci_margins_ok(&result, MARGIN_TOLERANCE);
        all_feasible &= feasible;
        println!(
            "solver={} power_dbw={:.6} objective={:.9} support={} l1={} l2={} iterations={} feasible={}{}",
            solver,
            result.power_dbw,
            solution.objective,
            solution.support.len(),
            solution.support_l1().unwrap_or(solution.support.len()),
            solution.support_l2().unwrap_or(solution.support.len()),
            solution.iterations,
            feasible,
            if capped { " (iteration cap)" } else { "" }
        );
        if solver == Solver::Icf {
            icf_validated = solution.validated_support.clone();
        }
    }
    if let Some(validated) = icf_validated {
        match verify_support(&problem, &validated) {
            Ok(check) => println!(
                "icf support check: c1={} (min {:.3e}) c2={} (max {:.3e}) certified={}",
                check.c1_holds,
                check.min_c1_value,
                check.c2_holds,
                check.max_c2_value,
                check.certifies()
            ),
            Err(e) => println!("icf support check: not applicable ({e})"),
        }
    }
    if all_feasible {
        0
    } else {
        1
    }
}

/// The SINR-driven grid of the power-versus-SINR experiment: 0-18 dB in
/// 2 dB steps, with QPSK on [0, 6], 8PSK on (6, 12], and 16QAM on (12, 18].
fn fig1_configs(base: &SweepConfig) -> Vec<SweepConfig> {
    [
        ("psk4", vec![0.0, 2.0, 4.0, 6.0]),
        ("psk8", vec![8.0, 10.0, 12.0]),
        ("qam16", vec![14.0, 16.0, 18.0]),
    ]
    .into_iter()
    .map(|(label, gamma_db)| SweepConfig {
        modulations: vec![label.to_string()],
        k_users: vec![8],
        antennas: Antennas::Fixed(8),
        gamma_db,
        ..base.clone()
    })
    .collect()
}

/// The user-count sweep at load factor 6/5 (gamma fixed at 6 dB, QPSK).
fn fig2_configs(base: &SweepConfig) -> Vec<SweepConfig> {
    vec![SweepConfig {
        modulations: vec!["psk4".to_string()],
        k_users: vec![10, 20, 40, 60, 80, 100],
        antennas: Antennas::LoadFactor(1.2),
        gamma_db: vec![6.0],
        ..base.clone()
    }]
}

fn resolve_sweep_configs(args: &SweepArgs) -> Result<Vec<SweepConfig>, (String, u8)> {
    let solvers = if args.solver.is_empty() {
        config::default_solvers()
    } else {
        args.solver.clone()
    };
    let base = SweepConfig {
        modulations: Vec::new(),
        k_users: Vec::new(),
        antennas: Antennas::Fixed(0),
        gamma_db: Vec::new(),
        trials: args.trials.unwrap_or(config::DEFAULT_TRIALS),
        seed: args.seed.unwrap_or(config::DEFAULT_SEED),
        solvers,
        apgd_nmax: args.nmax.unwrap_or(config::DEFAULT_NMAX),
        measure_timing: args.timing,
    };

    let mut configs = if let Some(preset) = &args.preset {
        if !args.k.is_empty()
            || args.n.is_some()
            || args.beta.is_some()
            || !args.modulation.is_empty()
            || !args.gamma_db.is_empty()
        {
            return Err((
                "a preset fixes the grid; drop --k/--n/--beta/--mod/--gamma-db".into(),
                2,
            ));
        }
        match preset.as_str() {
            "fig1" => fig1_configs(&base),
            "fig2" => fig2_configs(&base),
            other => return Err((format!("unknown preset {other:?} (fig1|fig2)"), 2)),
        }
    } else if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| (format!("cannot read {}: {e}", path.display()), 2))?;
        let mut parsed = parse_sweep_config(&text).map_err(|e| (e, 2))?;
        // Explicit flags override the file.
        if let Some(trials) = args.trials {
            parsed.trials = trials;
        }
        if let Some(seed) = args.seed {
            parsed.seed = seed;
        }
        if !args.solver.is_empty() {
            parsed.solvers = args.solver.clone();
        }
        if let Some(nmax) = args.nmax {
            parsed.apgd_nmax = nmax;
        }
        parsed.measure_timing |= args.timing;
        vec![parsed]
    } else {
        let antennas = match (&args.n, &args.beta) {
            (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            (Some(n), None) => Antennas::Fixed(*n),
            (None, Some(beta)) => Antennas::LoadFactor(
                config::parse_ratio(beta)
                    .map_err(|_| (format!("bad --beta value {beta:?}"), 2))?,
            ),
            (None, None) => {
                return Err(("one of --n or --beta is required (or use --preset/--config)".into(), 2))
            }
        };
        if args.k.is_empty() || args.modulation.is_empty() || args.gamma_db.is_empty() {
            return Err(("--k, --mod and --gamma-db are required without a preset".into(), 2));
        }
        vec![SweepConfig {
            modulations: args.modulation.clone(),
            k_users: args.k.clone(),
            antennas,
            gamma_db: args.gamma_db.clone(),
            ..base
        }]
    };

    for config in &mut configs {
        config.validate().map_err(|e| (e.to_string(), 2))?;
    }
    Ok(configs)
}

fn cmd_sweep(args: SweepArgs) -> u8 {
    let configs = match resolve_sweep_configs(&args) {
        Ok(c) => c,
        Err((msg, code)) => {
            eprintln!("error: {msg}");
            return code;
        }
    };

    // Open the output files before doing any work so an unwritable path
    // fails fast.
    if let Err(e) = std::fs::create_dir_all(&args.out) {
        eprintln!("error: cannot create {}: {e}", args.out.display());
        return 1;
    }
    let raw_path = args.out.join("raw.csv");
    let aggregate_path = args.out.join("aggregate.csv");
    let (raw_file, aggregate_file) = match (File::create(&raw_path), File::create(&aggregate_path))
    {
        (Ok(r), Ok(a)) => (r, a),
        (r, a) => {
            let err = r.err().or(a.err()).expect("one side failed");
            eprintln!("error: cannot write into {}: {err}", args.out.display());
            return 1;
        }
    };

    let mut records = Vec::new();
    for config in &configs {
        match sweep(config, args.jobs) {
            Ok(mut cell) => records.append(&mut cell),
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        }
    }
    let aggregates = aggregate(&records);

    if let Err(e) = csvout::write_raw(BufWriter::new(raw_file), &records)
        .and_then(|_| csvout::write_aggregate(BufWriter::new(aggregate_file), &aggregates))
    {
        eprintln!("error: writing CSVs: {e}");
        return 1;
    }

    println!(
        "wrote {} records to {} and {} aggregate rows to {}",
        records.len(),
        raw_path.display(),
        aggregates.len(),
        aggregate_path.display()
    );
    for a in &aggregates {
        println!(
            "mod={} K={} N={} gamma={}dB solver={} mean_power={:.4} dBW median_wall={} ns trials={}",
            a.modulation,
            a.k_users,
            a.n_tx,
            a.gamma_db,
            a.solver,
            a.mean_power_dbw,
            a.median_wall_ns,
            a.trials
        );
    }
    0
}

fn cmd_check(args: CheckArgs) -> u8 {
    let config = CheckConfig {
        apgd_nmax: args.nmax,
        ..CheckConfig::new(args.seed, args.batch, args.k, args.n, &args.modulation, args.gamma_db)
    };
    let report = match run_check(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    println!(
        "check: mod={} K={} N={} gamma={} dB seed={} batch={} ({} degenerate)",
        args.modulation,
        args.k,
        args.n,
        args.gamma_db,
        args.seed,
        report.batch,
        report.degenerate_trials
    );
    let mut out = std::io::stdout().lock();
    for tally in &report.tallies {
        let status = if tally.violations == 0 { "ok" } else { "FAIL" };
        write!(
            out,
            "{status:4} {:20} checked={:5} violations={}",
            tally.name, tally.checked, tally.violations
        )
        .expect("stdout");
        if let Some(trial) = tally.first_failure {
            write!(out, " first-failure: seed={} trial={trial}", args.seed).expect("stdout");
        }
        writeln!(out).expect("stdout");
    }
    if report.passed() {
        println!("all invariants hold");
        0
    } else {
        println!("invariant violations detected");
        1
    }
}
