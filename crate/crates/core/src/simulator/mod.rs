//! Slot-level Monte Carlo engine.

mod association;
mod deployment;
mod engine;
mod metrics;
mod replicate;
mod rng;

pub use association::{associate, Association};
pub use deployment::{generate_deployment, Deployment, Point};
pub use engine::{full_buffer_dl_coverage, run_simulation, CoverageCount, SimSettings};
pub use metrics::{
    measure_throughput, per_ue_throughput, LinkCounters, LinkRecord, QueueStats, SimMetrics,
    TierBusy,
};
pub use replicate::{
    confidence_halfwidth, run_replications, simulate_once, ReplicationOutcome, ReplicationSummary,
    MAX_SEED_RETRIES,
};

use thiserror::Error;

use crate::config::ConfigErrors;

#[derive(Debug, Clone, Error)]
pub enum SimError {
    #[error("deployment for seed {seed} has no SAPs")]
    DegenerateDeployment { seed: u64 },
    #[error("no UE lies inside the measurement disk")]
    NoMeasuredUes,
    #[error("invalid simulation input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Config(ConfigErrors),
}
