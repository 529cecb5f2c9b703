//! Flat key-value sweep configuration files.
//!
//! One `key = value` pair per line, `#` comments, lists comma-separated:
//!
//! ```text
//! modulation = psk4,psk8
//! k = 8,16
//! n = 8            # or: beta = 1.2
//! gamma_db = 0,2,4,6
//! trials = 200
//! seed = 1
//! solvers = exact,apgd,cf,icf,zf
//! nmax = 25
//! timing = false
//! ```

use slp_core::nnls::Solver;

use crate::sim::{Antennas, SweepConfig};

pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_NMAX: usize = 25;
pub const DEFAULT_SEED: u64 = 1;

pub fn default_solvers() -> Vec<Solver> {
    Solver::ALL.to_vec()
}

/// Parse a config file body into a [`SweepConfig`].
///
/// Required keys: `modulation`, `k`, `gamma_db`, and exactly one of
/// `n` / `beta`. Everything else defaults as in the CLI.
pub fn parse_sweep_config(text: &str) -> Result<SweepConfig, String> {
    let mut modulations: Option<Vec<String>> = None;
    let mut k_users: Option<Vec<usize>> = None;
    let mut n_tx: Option<usize> = None;
    let mut beta: Option<f64> = None;
    let mut gamma_db: Option<Vec<f64>> = None;
    let mut trials = DEFAULT_TRIALS;
    let mut seed = DEFAULT_SEED;
    let mut solvers = default_solvers();
    let mut apgd_nmax = DEFAULT_NMAX;
    let mut timing = false;

    for (line_no, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", line_no + 1))?;
        let key = key.trim();
        let value = value.trim();
        let context = |what: &str| format!("line {}: bad {what} value {value:?}", line_no + 1);
        match key {
            "modulation" | "mod" => {
                modulations = Some(value.split(',').map(|s| s.trim().to_string()).collect())
            }
            "k" | "k_users" => {
                k_users = Some(parse_list(value).map_err(|_| context("k"))?);
            }
            "n" | "n_tx" => n_tx = Some(value.parse().map_err(|_| context("n"))?),
            "beta" => beta = Some(parse_ratio(value).map_err(|_| context("beta"))?),
            "gamma_db" => {
                let parsed: Result<Vec<f64>, _> =
                    value.split(',').map(|s| s.trim().parse()).collect();
                gamma_db = Some(parsed.map_err(|_| context("gamma_db"))?);
            }
            "trials" => trials = value.parse().map_err(|_| context("trials"))?,
            "seed" => seed = value.parse().map_err(|_| context("seed"))?,
            "solvers" | "solver" => {
                let parsed: Result<Vec<Solver>, _> =
                    value.split(',').map(|s| s.trim().parse()).collect();
                solvers = parsed.map_err(|e| format!("line {}: {e}", line_no + 1))?;
            }
            "nmax" | "apgd_nmax" => apgd_nmax = value.parse().map_err(|_| context("nmax"))?,
            "timing" => timing = value.parse().map_err(|_| context("timing"))?,
            other => return Err(format!("line {}: unknown key {other:?}", line_no + 1)),
        }
    }

    let antennas = match (n_tx, beta) {
        (Some(_), Some(_)) => return Err("specify only one of `n` and `beta`".into()),
        (Some(n), None) => Antennas::Fixed(n),
        (None, Some(b)) => Antennas::LoadFactor(b),
        (None, None) => return Err("one of `n` or `beta` is required".into()),
    };

    Ok(SweepConfig {
        modulations: modulations.ok_or("`modulation` is required")?,
        k_users: k_users.ok_or("`k` is required")?,
        antennas,
        gamma_db: gamma_db.ok_or("`gamma_db` is required")?,
        trials,
        seed,
        solvers,
        apgd_nmax,
        measure_timing: timing,
    })
}

fn parse_list(value: &str) -> Result<Vec<usize>, ()> {
    value
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| ()))
        .collect()
}

/// Accept `1.2` or `6/5`.
pub fn parse_ratio(value: &str) -> Result<f64, ()> {
    if let Some((num, den)) = value.split_once('/') {
        let num: f64 = num.trim().parse().map_err(|_| ())?;
        let den: f64 = den.trim().parse().map_err(|_| ())?;
        if den == 0.0 {
            return Err(());
        }
        Ok(num / den)
    } else {
        value.trim().parse().map_err(|_| ())
    }
}
