//! Packet-throughput models for small-cell networks under static and
//! dynamic time-division duplexing.
//!
//! Two engines answer the same question. [`analysis`] evaluates closed-form
//! throughput expressions built from stochastic-geometry interference
//! factors and discrete-time queueing; [`simulator`] runs the slot-level
//! system (PPP deployments, capped nearest-SAP association, Bernoulli
//! arrivals, SIR-threshold retransmissions) and measures the same metric.
//! [`oracles`] holds the brute-force references both are checked against.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analysis;
pub mod config;
pub mod oracles;
pub mod report;
pub mod simulator;
pub mod units;

pub use config::{
    validate_config, ConfigDocument, ConfigError, ConfigErrors, NetworkConfig, Scenario,
    SimulationSection, TddPolicy, TrafficConfig,
};
pub use report::{Direction, ThroughputReport};
