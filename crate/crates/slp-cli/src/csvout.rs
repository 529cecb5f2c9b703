//! CSV emission for raw trial records and per-cell aggregates.
//!
//! These writers are the only persistence of the harness; both render
//! floats with Rust's shortest round-trip formatting, so identical records
//! always serialize to identical bytes.

use std::io::{self, Write};

use crate::sim::{AggregateRecord, TrialRecord};

pub const RAW_HEADER: &str =
    "solver,modulation,K,N,gamma_db,trial,power_dbw,wall_ns,iterations,support_l1,support_l2,feasible,degenerate";

pub const AGGREGATE_HEADER: &str =
    "solver,modulation,K,N,gamma_db,mean_power_dbw,median_wall_ns,trials";

pub fn write_raw<W: Write>(mut out: W, records: &[TrialRecord]) -> io::Result<()> {
    writeln!(out, "{RAW_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.solver,
            r.modulation,
            r.k_users,
            r.n_tx,
            r.gamma_db,
            r.trial,
            r.power_dbw,
            r.wall_ns,
            r.iterations,
            r.support_l1,
            r.support_l2,
            r.feasible,
            r.degenerate
        )?;
    }
    Ok(())
}

pub fn write_aggregate<W: Write>(mut out: W, aggregates: &[AggregateRecord]) -> io::Result<()> {
    writeln!(out, "{AGGREGATE_HEADER}")?;
    for a in aggregates {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            a.solver,
            a.modulation,
            a.k_users,
            a.n_tx,
            a.gamma_db,
            a.mean_power_dbw,
            a.median_wall_ns,
            a.trials
        )?;
    }
    Ok(())
}

pub fn render_raw(records: &[TrialRecord]) -> String {
    let mut buf = Vec::new();
    write_raw(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("csv is ascii")
}

pub fn render_aggregate(aggregates: &[AggregateRecord]) -> String {
    let mut buf = Vec::new();
    write_aggregate(&mut buf, aggregates).expect("writing to memory");
    String::from_utf8(buf).expect("csv is ascii")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{aggregate, sweep, Antennas, SweepConfig};
    use slp_core::nnls::Solver;

    #[test]
    fn rendering_is_stable_and_parsable() {
        let config = SweepConfig {
            modulations: vec!["psk4".into()],
            k_users: vec![2],
            antennas: Antennas::Fixed(2),
            gamma_db: vec![3.0],
            trials: 4,
            seed: 4,
            solvers: vec![Solver::Icf, Solver::Zf],
            apgd_nmax: 25,
            measure_timing: false,
        };
        let records = sweep(&config, 1).unwrap();
        let raw = render_raw(&records);
        assert_eq!(raw, render_raw(&records));
        let mut lines = raw.lines();
        assert_eq!(lines.next().unwrap(), RAW_HEADER);
        let first = lines.next().unwrap();
        let fields: Vec<&str> = first.split(',').collect();
        assert_eq!(fields.len(), 13);
        assert_eq!(fields[0], "icf");
        assert_eq!(fields[1], "psk4");
        assert_eq!(fields[4], "3");
        fields[6].parse::<f64>().unwrap();

        let aggs = aggregate(&records);
        let rendered = render_aggregate(&aggs);
        let mut lines = rendered.lines();
        assert_eq!(lines.next().unwrap(), AGGREGATE_HEADER);
        assert_eq!(lines.count(), 2);
    }
}
