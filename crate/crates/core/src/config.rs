//! Scenario parameters, their invariants, and the JSON configuration document.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::{db_to_linear, dbm_to_watts};

/// Deployment and radio parameters of the network. Powers and the SIR
/// threshold are linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// SAPs per m².
    pub sap_density: f64,
    /// UEs per m².
    pub ue_density: f64,
    /// SAP transmit power, W.
    pub sap_power: f64,
    /// UE transmit power, W.
    pub ue_power: f64,
    pub path_loss_exp: f64,
    pub sir_threshold: f64,
    /// Maximum number of UEs a SAP serves.
    pub ue_cap: usize,
}

impl NetworkConfig {
    /// The reference operating point: 1e-4 SAPs/m², 1e-3 UEs/m², 23/17 dBm,
    /// cap 3, 0 dB threshold, path-loss exponent 3.8.
    pub fn standard() -> Self {
        Self {
            sap_density: 1e-4,
            ue_density: 1e-3,
            sap_power: dbm_to_watts(23.0),
            ue_power: dbm_to_watts(17.0),
            path_loss_exp: 3.8,
            sir_threshold: 1.0,
            ue_cap: 3,
        }
    }

    /// SAP-to-UE density ratio.
    pub fn density_ratio(&self) -> f64 {
        self.sap_density / self.ue_density
    }

    /// P_sap / P_ue.
    pub fn power_ratio(&self) -> f64 {
        self.sap_power / self.ue_power
    }
}

/// Per-UE Bernoulli arrival probabilities per slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficConfig {
    pub ul_rate: f64,
    pub dl_rate: f64,
}

impl TrafficConfig {
    pub fn new(ul_rate: f64, dl_rate: f64) -> Self {
        Self { ul_rate, dl_rate }
    }

    pub fn total(&self) -> f64 {
        self.ul_rate + self.dl_rate
    }

    pub fn is_idle(&self) -> bool {
        self.ul_rate == 0.0 && self.dl_rate == 0.0
    }
}

/// Slot-direction policy. Static TDD flips one coin for the whole network
/// each slot; dynamic TDD flips one coin per SAP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TddPolicy {
    Static { dl_fraction: f64 },
    Dynamic { dl_fraction: f64 },
}

impl TddPolicy {
    pub fn dl_fraction(&self) -> f64 {
        match *self {
            TddPolicy::Static { dl_fraction } | TddPolicy::Dynamic { dl_fraction } => dl_fraction,
        }
    }

    pub fn is_dynamic(&self) -> bool {
        matches!(self, TddPolicy::Dynamic { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            TddPolicy::Static { .. } => "STDD",
            TddPolicy::Dynamic { .. } => "DTDD",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("invalid parameter `{field}` = {value}: must satisfy {constraint}")]
    InvalidParameter {
        field: &'static str,
        value: String,
        constraint: &'static str,
    },
}

impl ConfigError {
    fn invalid(field: &'static str, value: impl fmt::Display, constraint: &'static str) -> Self {
        ConfigError::InvalidParameter {
            field,
            value: value.to_string(),
            constraint,
        }
    }

    pub fn field(&self) -> &'static str {
        match self {
            ConfigError::InvalidParameter { field, .. } => field,
        }
    }
}

/// Every invariant violation found in one pass.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl ConfigErrors {
    pub fn fields(&self) -> Vec<&'static str> {
        self.0.iter().map(ConfigError::field).collect()
    }
}

/// A network, traffic and policy triple that passed [`validate_config`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub network: NetworkConfig,
    pub traffic: TrafficConfig,
    pub policy: TddPolicy,
}

fn positive_finite(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

fn unit_interval(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

/// Checks every parameter invariant and returns the inputs unchanged, or
/// the full list of violations.
pub fn validate_config(
    net: NetworkConfig,
    traffic: TrafficConfig,
    policy: TddPolicy,
) -> Result<Scenario, ConfigErrors> {
    let mut errs = Vec::new();
    let mut check = |ok: bool, field, value: f64, constraint| {
        if !ok {
            errs.push(ConfigError::invalid(field, value, constraint));
        }
    };
    check(
        positive_finite(net.sap_density),
        "sap_density",
        net.sap_density,
        "> 0",
    );
    check(
        positive_finite(net.ue_density),
        "ue_density",
        net.ue_density,
        "> 0",
    );
    check(
        positive_finite(net.sap_power),
        "sap_power",
        net.sap_power,
        "> 0",
    );
    check(
        positive_finite(net.ue_power),
        "ue_power",
        net.ue_power,
        "> 0",
    );
    check(
        net.path_loss_exp.is_finite() && net.path_loss_exp > 2.0,
        "path_loss_exp",
        net.path_loss_exp,
        "> 2",
    );
    check(
        positive_finite(net.sir_threshold),
        "sir_threshold",
        net.sir_threshold,
        "> 0",
    );
    check(
        unit_interval(traffic.ul_rate),
        "ul_rate",
        traffic.ul_rate,
        "in [0, 1]",
    );
    check(
        unit_interval(traffic.dl_rate),
        "dl_rate",
        traffic.dl_rate,
        "in [0, 1]",
    );
    check(
        unit_interval(policy.dl_fraction()),
        "dl_fraction",
        policy.dl_fraction(),
        "in [0, 1]",
    );
    if net.ue_cap < 1 {
        errs.push(ConfigError::invalid("ue_cap", net.ue_cap, ">= 1"));
    }
    if errs.is_empty() {
        Ok(Scenario {
            network: net,
            traffic,
            policy,
        })
    } else {
        Err(ConfigErrors(errs))
    }
}

// ---------------------------------------------------------------------------
// JSON document
// ---------------------------------------------------------------------------

/// Network block as written in a config file. Each power and the threshold
/// may be given linearly or with a `_dbm` / `_db` suffix, not both.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub sap_density: Option<f64>,
    pub ue_density: Option<f64>,
    pub sap_power: Option<f64>,
    pub sap_power_dbm: Option<f64>,
    pub ue_power: Option<f64>,
    pub ue_power_dbm: Option<f64>,
    pub path_loss_exp: Option<f64>,
    pub sir_threshold: Option<f64>,
    pub sir_threshold_db: Option<f64>,
    pub ue_cap: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TddMode {
    Static,
    Dynamic,
}

/// Policy block. A missing `dl_fraction` selects the traffic-balancing
/// fraction `dl_rate / (ul_rate + dl_rate)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    pub mode: TddMode,
    #[serde(default)]
    pub dl_fraction: Option<f64>,
}

/// Monte Carlo run parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    #[serde(default = "default_radius")]
    pub region_radius_m: f64,
    pub slots: u64,
    #[serde(default)]
    pub warmup: u64,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub base_seed: u64,
}

fn default_radius() -> f64 {
    500.0
}

fn default_replications() -> usize {
    1
}

impl SimulationSection {
    pub fn validate(&self) -> Result<(), ConfigErrors> {
        let mut errs = Vec::new();
        if !positive_finite(self.region_radius_m) {
            errs.push(ConfigError::invalid(
                "region_radius_m",
                self.region_radius_m,
                "> 0",
            ));
        }
        if self.slots <= self.warmup {
            errs.push(ConfigError::invalid("slots", self.slots, "> warmup"));
        }
        if self.replications == 0 {
            errs.push(ConfigError::invalid("replications", 0, ">= 1"));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(ConfigErrors(errs))
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    #[serde(default)]
    pub network: NetworkSection,
    pub traffic: TrafficConfig,
    pub policy: PolicySection,
    #[serde(default)]
    pub simulation: Option<SimulationSection>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(#[from] ConfigErrors),
}

fn pick(
    errs: &mut Vec<ConfigError>,
    field: &'static str,
    linear: Option<f64>,
    log: Option<f64>,
    to_linear: fn(f64) -> f64,
    default: f64,
) -> f64 {
    match (linear, log) {
        (Some(v), None) => v,
        (None, Some(v)) => to_linear(v),
        (None, None) => default,
        (Some(v), Some(_)) => {
            errs.push(ConfigError::invalid(
                field,
                v,
                "given at most once (linear or logarithmic)",
            ));
            v
        }
    }
}

impl NetworkSection {
    /// Resolves unit suffixes; unspecified fields take the reference values.
    pub fn resolve(&self) -> Result<NetworkConfig, ConfigErrors> {
        let d = NetworkConfig::standard();
        let mut errs = Vec::new();
        let sap_power = pick(
            &mut errs,
            "sap_power",
            self.sap_power,
            self.sap_power_dbm,
            dbm_to_watts,
            d.sap_power,
        );
        let ue_power = pick(
            &mut errs,
            "ue_power",
            self.ue_power,
            self.ue_power_dbm,
            dbm_to_watts,
            d.ue_power,
        );
        let sir_threshold = pick(
            &mut errs,
            "sir_threshold",
            self.sir_threshold,
            self.sir_threshold_db,
            db_to_linear,
            d.sir_threshold,
        );
        if !errs.is_empty() {
            return Err(ConfigErrors(errs));
        }
        Ok(NetworkConfig {
            sap_density: self.sap_density.unwrap_or(d.sap_density),
            ue_density: self.ue_density.unwrap_or(d.ue_density),
            sap_power,
            ue_power,
            path_loss_exp: self.path_loss_exp.unwrap_or(d.path_loss_exp),
            sir_threshold,
            ue_cap: self.ue_cap.unwrap_or(d.ue_cap),
        })
    }
}

impl PolicySection {
    pub fn resolve(&self, traffic: &TrafficConfig) -> Result<TddPolicy, ConfigErrors> {
        let dl_fraction = match self.dl_fraction {
            Some(p) => p,
            None => crate::analysis::optimal_dl_fraction(traffic).map_err(|_| {
                ConfigErrors(vec![ConfigError::invalid(
                    "dl_fraction",
                    "unset",
                    "explicit when both arrival rates are zero",
                )])
            })?,
        };
        Ok(match self.mode {
            TddMode::Static => TddPolicy::Static { dl_fraction },
            TddMode::Dynamic => TddPolicy::Dynamic { dl_fraction },
        })
    }
}

impl ConfigDocument {
    pub fn from_json(text: &str) -> Result<Self, LoadError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, LoadError> {
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Resolves units and defaults, then runs [`validate_config`] (and the
    /// simulation block checks when present).
    pub fn scenario(&self) -> Result<Scenario, ConfigErrors> {
        let network = self.network.resolve()?;
        let policy = self.policy.resolve(&self.traffic)?;
        let scenario = validate_config(network, self.traffic, policy)?;
        if let Some(sim) = &self.simulation {
            sim.validate()?;
        }
        Ok(scenario)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard_scenario() -> (NetworkConfig, TrafficConfig, TddPolicy) {
        (
            NetworkConfig::standard(),
            TrafficConfig::new(0.02, 0.02),
            TddPolicy::Static { dl_fraction: 0.5 },
        )
    }

    #[test]
    fn standard_parameters_validate() {
        let (n, t, p) = standard_scenario();
        let s = validate_config(n, t, p).unwrap();
        assert_eq!(s.network, n);
        assert_eq!(s.traffic, t);
        assert_eq!(s.policy, p);
    }

    #[test]
    fn path_loss_boundary_rejected() {
        let (mut n, t, p) = standard_scenario();
        n.path_loss_exp = 2.0;
        let e = validate_config(n, t, p).unwrap_err();
        assert_eq!(e.fields(), vec!["path_loss_exp"]);
    }

    #[test]
    fn dl_rate_out_of_range_rejected() {
        let (n, mut t, p) = standard_scenario();
        t.dl_rate = 1.2;
        let e = validate_config(n, t, p).unwrap_err();
        assert_eq!(e.fields(), vec!["dl_rate"]);
    }

    #[test]
    fn all_violations_reported_together() {
        let (mut n, mut t, _) = standard_scenario();
        n.sap_density = 0.0;
        n.ue_cap = 0;
        n.sir_threshold = -1.0;
        t.ul_rate = f64::NAN;
        let e = validate_config(n, t, TddPolicy::Dynamic { dl_fraction: 1.5 }).unwrap_err();
        let mut f = e.fields();
        f.sort();
        assert_eq!(
            f,
            vec![
                "dl_fraction",
                "sap_density",
                "sir_threshold",
                "ue_cap",
                "ul_rate"
            ]
        );
    }

    #[test]
    fn document_resolves_units_and_auto_fraction() {
        let doc = ConfigDocument::from_json(
            r#"{
                "network": {"sap_density": 1e-4, "ue_density": 1e-3,
                            "sap_power_dbm": 23, "ue_power_dbm": 17,
                            "path_loss_exp": 3.8, "sir_threshold_db": 0, "ue_cap": 3},
                "traffic": {"ul_rate": 0.02, "dl_rate": 0.06},
                "policy": {"mode": "dynamic"}
            }"#,
        )
        .unwrap();
        let s = doc.scenario().unwrap();
        assert_eq!(s.network, NetworkConfig::standard());
        assert_eq!(s.policy, TddPolicy::Dynamic { dl_fraction: 0.75 });
    }

    #[test]
    fn document_rejects_double_unit() {
        let doc = ConfigDocument::from_json(
            r#"{"network": {"sap_power": 0.2, "sap_power_dbm": 23},
                "traffic": {"ul_rate": 0.02, "dl_rate": 0.02},
                "policy": {"mode": "static", "dl_fraction": 0.5}}"#,
        )
        .unwrap();
        assert_eq!(doc.scenario().unwrap_err().fields(), vec!["sap_power"]);
    }

    #[test]
    fn simulation_block_requires_slots_after_warmup() {
        let doc = ConfigDocument::from_json(
            r#"{"traffic": {"ul_rate": 0.02, "dl_rate": 0.02},
                "policy": {"mode": "static", "dl_fraction": 0.5},
                "simulation": {"slots": 100, "warmup": 100}}"#,
        )
        .unwrap();
        assert_eq!(doc.scenario().unwrap_err().fields(), vec!["slots"]);
    }
}
