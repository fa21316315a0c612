use std::io::Write;
use std::path::Path;

use tddnet_core::analysis::analyze;

use crate::{load_config, output, write_err, CliError};

pub fn run(config: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let doc = load_config(config)?;
    let scenario = doc
        .scenario()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let report = analyze(&scenario).map_err(|e| CliError::Failed(e.to_string()))?;
    let mut w = output(out)?;
    serde_json::to_writer_pretty(&mut w, &report).map_err(|e| CliError::Failed(e.to_string()))?;
    writeln!(w).map_err(write_err(out))?;
    w.flush().map_err(write_err(out))?;
    eprintln!(
        "{}: DL {:.6} packets/slot, UL {:.6} packets/slot",
        scenario.policy.label(),
        report.dl_throughput,
        report.ul_throughput
    );
    Ok(())
}
