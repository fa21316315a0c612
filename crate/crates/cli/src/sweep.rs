//! Parameter sweeps over the DL/UL traffic ratio or the SAP/UE density
//! ratio, for either engine.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tddnet_core::analysis::{analyze, optimal_dl_fraction};
use tddnet_core::config::NetworkSection;
use tddnet_core::simulator::run_replications;
use tddnet_core::{
    validate_config, Direction, NetworkConfig, SimulationSection, TddPolicy, ThroughputReport,
    TrafficConfig,
};

use crate::simulate::MEASURE_FRACTION;
use crate::{cell, output, write_err, CliError};

pub const HEADER: [&str; 10] = [
    "axis",
    "value",
    "mode",
    "engine",
    "direction",
    "throughput",
    "ci_halfwidth",
    "service_rate",
    "dl_fraction",
    "error",
];

pub const DEFAULT_UL_RATE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    DlUlRatio,
    SapUeDensityRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "STDD")]
    Stdd,
    #[serde(rename = "DTDD")]
    Dtdd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Analysis,
    Simulation,
}

/// Traffic used by density sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrafficPreset {
    /// `xi_U = 0.005`, `xi_D = 0.01`
    #[default]
    Light,
    /// `xi_U = 0.05`, `xi_D = 0.1`
    Medium,
}

impl TrafficPreset {
    pub fn traffic(self) -> TrafficConfig {
        match self {
            TrafficPreset::Light => TrafficConfig::new(0.005, 0.01),
            TrafficPreset::Medium => TrafficConfig::new(0.05, 0.1),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub modes: Vec<Mode>,
    pub engines: Vec<Engine>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    /// Fixed UL rate of ratio sweeps.
    #[serde(default)]
    pub ul_rate: Option<f64>,
    #[serde(default)]
    pub traffic_preset: TrafficPreset,
    #[serde(default)]
    pub network: NetworkSection,
    #[serde(default)]
    pub simulation: Option<SimulationSection>,
}

fn default_simulation() -> SimulationSection {
    SimulationSection {
        region_radius_m: 500.0,
        slots: 100_000,
        warmup: 10_000,
        replications: 20,
        base_seed: 0,
    }
}

impl SweepSpec {
    pub fn check(&self) -> Result<(), String> {
        if self.values.is_empty() {
            return Err("`values` must not be empty".into());
        }
        if self.values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err("`values` must be positive and finite".into());
        }
        if self.values.windows(2).any(|w| w[1] <= w[0]) {
            return Err("`values` must be strictly increasing".into());
        }
        if self.modes.is_empty() || self.engines.is_empty() {
            return Err("at least one mode and one engine are required".into());
        }
        if let Some(u) = self.ul_rate {
            if !(u > 0.0 && u <= 1.0) {
                return Err(format!("`ul_rate` must be in (0, 1] (got {u})"));
            }
        }
        Ok(())
    }

    /// Network and traffic at one axis value.
    pub fn point(&self, base: &NetworkConfig, value: f64) -> (NetworkConfig, TrafficConfig) {
        match self.axis {
            Axis::DlUlRatio => {
                let u = self.ul_rate.unwrap_or(DEFAULT_UL_RATE);
                (*base, TrafficConfig::new(u, value * u))
            }
            Axis::SapUeDensityRatio => {
                let mut net = *base;
                net.sap_density = value * net.ue_density;
                (net, self.traffic_preset.traffic())
            }
        }
    }
}

pub fn load_spec(path: &Path) -> Result<SweepSpec, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read sweep spec {}: {e}", path.display())))?;
    let spec: SweepSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("malformed sweep spec {}: {e}", path.display())))?;
    spec.check()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(spec)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub value: f64,
    pub mode: Mode,
    pub engine: Engine,
    pub outcome: Result<(ThroughputReport, f64), String>,
}

fn evaluate(
    spec: &SweepSpec,
    base: &NetworkConfig,
    sim: &SimulationSection,
    value: f64,
    mode: Mode,
    engine: Engine,
) -> Result<(ThroughputReport, f64), String> {
    let (net, traffic) = spec.point(base, value);
    let p = optimal_dl_fraction(&traffic).map_err(|e| e.to_string())?;
    let policy = match mode {
        Mode::Stdd => TddPolicy::Static { dl_fraction: p },
        Mode::Dtdd => TddPolicy::Dynamic { dl_fraction: p },
    };
    let scenario = validate_config(net, traffic, policy).map_err(|e| e.to_string())?;
    let report = match engine {
        Engine::Analysis => analyze(&scenario).map_err(|e| e.to_string())?,
        Engine::Simulation => {
            run_replications(&scenario, sim, MEASURE_FRACTION)
                .map_err(|e| e.to_string())?
                .aggregate
        }
    };
    Ok((report, p))
}

/// Evaluates every (value, mode, engine) point. A failing point is
/// recorded and the sweep carries on. Output order follows the spec.
pub fn run_sweep(spec: &SweepSpec, seed: Option<u64>) -> Result<Vec<PointResult>, CliError> {
    let base = spec
        .network
        .resolve()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut sim = spec.simulation.unwrap_or_else(default_simulation);
    if let Some(s) = seed {
        sim.base_seed = s;
    }
    if spec.engines.contains(&Engine::Simulation) {
        sim.validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let tasks: Vec<(f64, Mode, Engine)> = spec
        .values
        .iter()
        .flat_map(|&v| {
            spec.modes
                .iter()
                .flat_map(move |&m| spec.engines.iter().map(move |&e| (v, m, e)))
        })
        .collect();
    Ok(tasks
        .into_par_iter()
        .map(|(value, mode, engine)| PointResult {
            value,
            mode,
            engine,
            outcome: evaluate(spec, &base, &sim, value, mode, engine),
        })
        .collect())
}

fn label<T: Serialize>(x: &T) -> String {
    serde_json::to_value(x)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn service_rate(r: &ThroughputReport, engine: Engine, dir: Direction) -> f64 {
    let key = match (engine, dir) {
        (Engine::Analysis, Direction::Dl) => "mu_dl",
        (Engine::Analysis, Direction::Ul) => "mu_ul",
        (Engine::Simulation, Direction::Dl) => "dl_service_rate",
        (Engine::Simulation, Direction::Ul) => "ul_service_rate",
    };
    r.diag(key).unwrap_or(f64::NAN)
}

pub fn write_csv<W: Write>(w: W, axis: Axis, results: &[PointResult]) -> csv::Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(HEADER)?;
    let axis = label(&axis);
    for r in results {
        for dir in Direction::BOTH {
            let (throughput, ci, mu, p, error) = match &r.outcome {
                Ok((rep, p)) => (
                    cell(rep.throughput(dir)),
                    cell(rep.ci_halfwidth(dir)),
                    cell(service_rate(rep, r.engine, dir)),
                    cell(*p),
                    String::new(),
                ),
                Err(e) => (
                    "NA".into(),
                    "NA".into(),
                    "NA".into(),
                    "NA".into(),
                    e.clone(),
                ),
            };
            csv.write_record([
                axis.clone(),
                cell(r.value),
                label(&r.mode),
                label(&r.engine),
                dir.to_string(),
                throughput,
                ci,
                mu,
                p,
                error,
            ])?;
        }
    }
    csv.flush()?;
    Ok(())
}

pub fn run(spec_path: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<(), CliError> {
    let spec = load_spec(spec_path)?;
    let results = run_sweep(&spec, seed)?;
    let target = out.or(spec.output_path.as_deref());
    let mut w = output(target)?;
    write_csv(&mut w, spec.axis, &results).map_err(|e| CliError::Failed(e.to_string()))?;
    w.flush().map_err(write_err(target))?;
    let failed = results.iter().filter(|r| r.outcome.is_err()).count();
    eprintln!("{} points evaluated, {failed} failed", results.len());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(axis: Axis) -> SweepSpec {
        SweepSpec {
            axis,
            values: vec![0.5, 1.0],
            modes: vec![Mode::Stdd],
            engines: vec![Engine::Analysis],
            output_path: None,
            ul_rate: None,
            traffic_preset: TrafficPreset::Medium,
            network: NetworkSection::default(),
            simulation: None,
        }
    }

    #[test]
    fn ratio_axis_scales_dl_rate() {
        let s = spec(Axis::DlUlRatio);
        let (_, t) = s.point(&NetworkConfig::standard(), 3.0);
        assert_eq!(t.ul_rate, 0.02);
        assert!((t.dl_rate - 0.06).abs() < 1e-15);
    }

    #[test]
    fn density_axis_scales_sap_density() {
        let s = spec(Axis::SapUeDensityRatio);
        let (net, t) = s.point(&NetworkConfig::standard(), 0.2);
        assert!((net.sap_density - 2e-4).abs() < 1e-18);
        assert_eq!(net.ue_density, 1e-3);
        assert_eq!(t, TrafficConfig::new(0.05, 0.1));
    }

    #[test]
    fn spec_checks() {
        let mut s = spec(Axis::DlUlRatio);
        assert!(s.check().is_ok());
        s.values = vec![1.0, 1.0];
        assert!(s.check().is_err());
        s.values = vec![];
        assert!(s.check().is_err());
        s.values = vec![1.0];
        s.modes.clear();
        assert!(s.check().is_err());
    }

    #[test]
    fn labels_match_serde_names() {
        assert_eq!(label(&Axis::SapUeDensityRatio), "sap_ue_density_ratio");
        assert_eq!(label(&Mode::Dtdd), "DTDD");
        assert_eq!(label(&Engine::Simulation), "simulation");
    }
}
