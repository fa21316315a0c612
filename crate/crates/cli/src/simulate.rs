use std::io::Write;
use std::path::Path;

use tddnet_core::simulator::{run_replications, ReplicationSummary};
use tddnet_core::{Direction, ThroughputReport};

use crate::{cell, load_config, output, write_err, CliError};

pub const HEADER: [&str; 6] = [
    "seed",
    "direction",
    "mean_throughput",
    "ci",
    "service_rate_est",
    "busy_fraction",
];

/// Inner-disk fraction used for measurement.
pub const MEASURE_FRACTION: f64 = 0.5;

fn diag(r: &ThroughputReport, dir: Direction, what: &str) -> f64 {
    let key = format!("{}_{what}", dir.as_str().to_ascii_lowercase());
    r.diag(&key).unwrap_or(f64::NAN)
}

/// Writes one row per replication and direction, then the aggregate rows
/// with `NA` in the seed column.
pub fn write_csv<W: Write>(w: W, summary: &ReplicationSummary) -> csv::Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(HEADER)?;
    for rep in &summary.replications {
        for dir in Direction::BOTH {
            csv.write_record([
                rep.seed.to_string(),
                dir.to_string(),
                cell(rep.report.throughput(dir)),
                "NA".to_string(),
                cell(diag(&rep.report, dir, "service_rate")),
                cell(diag(&rep.report, dir, "busy_fraction")),
            ])?;
        }
    }
    let agg = &summary.aggregate;
    for dir in Direction::BOTH {
        csv.write_record([
            "NA".to_string(),
            dir.to_string(),
            cell(agg.throughput(dir)),
            cell(agg.ci_halfwidth(dir)),
            cell(diag(agg, dir, "service_rate")),
            cell(diag(agg, dir, "busy_fraction")),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn run(config: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<(), CliError> {
    let doc = load_config(config)?;
    let scenario = doc
        .scenario()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut sim = doc.simulation.ok_or_else(|| {
        CliError::Config(format!("{}: missing `simulation` block", config.display()))
    })?;
    if let Some(s) = seed {
        sim.base_seed = s;
    }
    sim.validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let summary = run_replications(&scenario, &sim, MEASURE_FRACTION)
        .map_err(|e| CliError::Failed(e.to_string()))?;
    let mut w = output(out)?;
    write_csv(&mut w, &summary).map_err(|e| CliError::Failed(e.to_string()))?;
    w.flush().map_err(write_err(out))?;
    let a = &summary.aggregate;
    eprintln!(
        "{} x{}: DL {:.6} ± {:.6}, UL {:.6} ± {:.6} packets/slot",
        scenario.policy.label(),
        summary.replications.len(),
        a.dl_throughput,
        a.dl_ci_halfwidth,
        a.ul_throughput,
        a.ul_ci_halfwidth
    );
    Ok(())
}
