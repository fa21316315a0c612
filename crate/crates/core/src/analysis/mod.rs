//! Closed-form packet-throughput engine.
//!
//! Each SAP serves up to `K` UEs, each with one DL and one UL queue fed by
//! Bernoulli arrivals. A SAP schedules one of its UEs uniformly at random per
//! slot, so a queue in a cell of `k` UEs behaves as a discrete-time queue
//! with service probability `share · mu / k`. The success probability `mu`
//! follows from PPP interference with activity-thinned interferers.

mod dtdd;
mod load;
mod queue;
mod special;
mod stdd;

pub use dtdd::{
    dtdd_fixed_point, dtdd_service_rates, dtdd_throughput, CouplingCoefficients, CouplingSystem,
    FixedPoint,
};
pub use load::{cell_load_pmf, mean_load, CellLoadPmf, VORONOI_SHAPE};
pub use queue::{activity_probability, geo_g1_idle_prob, geo_g1_throughput, optimal_dl_fraction};
pub use special::{v_factor, z_factor, InterferenceFactors, Z_TOLERANCE};
pub use stdd::{stdd_service_rates, stdd_throughput, stdd_throughput_explicit};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{Scenario, TddPolicy};
use crate::report::ThroughputReport;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{what} did not converge within {iterations} iterations")]
    Convergence {
        what: &'static str,
        iterations: usize,
    },
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("{which} service-rate denominator is non-positive ({value:e})")]
    DegenerateDenominator { which: &'static str, value: f64 },
}

/// Per-slot transmission success probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServiceRates {
    pub ul: f64,
    pub dl: f64,
}

/// Evaluates a validated scenario with the closed form matching its policy.
/// Static TDD uses the configured DL fraction; dynamic TDD always uses the
/// load-balancing fraction its closed form assumes.
pub fn analyze(scenario: &Scenario) -> Result<ThroughputReport, AnalysisError> {
    let net = &scenario.network;
    let pmf = cell_load_pmf(net.density_ratio(), net.ue_cap)?;
    let f = InterferenceFactors::new(net.sir_threshold, net.path_loss_exp)?;
    match scenario.policy {
        TddPolicy::Static { dl_fraction } => Ok(stdd::stdd_throughput_with(
            &f,
            &scenario.traffic,
            dl_fraction,
            &pmf,
        )),
        TddPolicy::Dynamic { .. } => dtdd::dtdd_throughput_with(&f, net, &scenario.traffic, &pmf),
    }
}
