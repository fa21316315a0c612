use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::engine::{run_simulation, SimSettings};
use super::metrics::{measure_throughput, SimMetrics};
use super::{associate, generate_deployment, SimError};
use crate::config::{Scenario, SimulationSection};
use crate::report::ThroughputReport;

/// Fresh seeds tried per replication before giving up on a degenerate
/// deployment.
pub const MAX_SEED_RETRIES: u64 = 10;

/// Draws a deployment, associates UEs and runs the slot engine.
pub fn simulate_once(
    scenario: &Scenario,
    region_radius: f64,
    settings: &SimSettings,
) -> Result<SimMetrics, SimError> {
    let net = &scenario.network;
    let dep = generate_deployment(net, region_radius, settings.seed)?;
    let assoc = associate(&dep, net.ue_cap, settings.seed);
    run_simulation(
        &dep,
        &assoc,
        net,
        &scenario.traffic,
        &scenario.policy,
        settings,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationOutcome {
    pub index: usize,
    /// Seed that produced a usable deployment.
    pub seed: u64,
    pub report: ThroughputReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationSummary {
    pub replications: Vec<ReplicationOutcome>,
    /// Replication means with 95% Student-t half-widths.
    pub aggregate: ThroughputReport,
}

/// Half-width of the two-sided confidence interval for the mean of
/// `samples`. NaN with fewer than two samples.
pub fn confidence_halfwidth(samples: &[f64], level: f64) -> f64 {
    let n = samples.len();
    if n < 2 {
        return f64::NAN;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.5 + level / 2.0);
    t * (var / n as f64).sqrt()
}

fn replicate_one(
    scenario: &Scenario,
    sim: &SimulationSection,
    measure_fraction: f64,
    index: usize,
) -> Result<ReplicationOutcome, SimError> {
    let mut last = sim.base_seed;
    for attempt in 0..MAX_SEED_RETRIES {
        let seed = sim
            .base_seed
            .wrapping_add(index as u64)
            .wrapping_add(attempt * sim.replications as u64);
        last = seed;
        let settings = SimSettings {
            measure_fraction,
            ..SimSettings::new(sim.slots, sim.warmup, seed)
        };
        let outcome = simulate_once(scenario, sim.region_radius_m, &settings)
            .and_then(|m| measure_throughput(&m, sim.slots));
        match outcome {
            Ok(report) => {
                return Ok(ReplicationOutcome {
                    index,
                    seed,
                    report,
                })
            }
            Err(SimError::DegenerateDeployment { .. } | SimError::NoMeasuredUes) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(SimError::DegenerateDeployment { seed: last })
}

/// Runs independent replications in parallel. Results are ordered by
/// replication index and do not depend on the worker count.
pub fn run_replications(
    scenario: &Scenario,
    sim: &SimulationSection,
    measure_fraction: f64,
) -> Result<ReplicationSummary, SimError> {
    sim.validate().map_err(SimError::Config)?;
    let replications = (0..sim.replications)
        .into_par_iter()
        .map(|i| replicate_one(scenario, sim, measure_fraction, i))
        .collect::<Result<Vec<_>, _>>()?;

    let dl: Vec<f64> = replications
        .iter()
        .map(|r| r.report.dl_throughput)
        .collect();
    let ul: Vec<f64> = replications
        .iter()
        .map(|r| r.report.ul_throughput)
        .collect();
    let n = replications.len() as f64;
    let mut aggregate =
        ThroughputReport::new(dl.iter().sum::<f64>() / n, ul.iter().sum::<f64>() / n);
    aggregate.dl_ci_halfwidth = confidence_halfwidth(&dl, 0.95);
    aggregate.ul_ci_halfwidth = confidence_halfwidth(&ul, 0.95);

    let mut sums: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for r in &replications {
        for (k, v) in &r.report.diagnostics {
            let e = sums.entry(k).or_default();
            e.0 += v;
            e.1 += 1;
        }
    }
    for (k, (s, c)) in sums {
        aggregate = aggregate.with(k, s / c as f64);
    }
    aggregate = aggregate.with("replications", n);
    Ok(ReplicationSummary {
        replications,
        aggregate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{NetworkConfig, TddPolicy, TrafficConfig};

    fn scenario(policy: TddPolicy, traffic: TrafficConfig) -> Scenario {
        Scenario {
            network: NetworkConfig::standard(),
            traffic,
            policy,
        }
    }

    fn section(slots: u64, replications: usize) -> SimulationSection {
        SimulationSection {
            region_radius_m: 300.0,
            slots,
            warmup: slots / 10,
            replications,
            base_seed: 17,
        }
    }

    #[test]
    fn halfwidth_reference_values() {
        assert!(confidence_halfwidth(&[1.0], 0.95).is_nan());
        // t(0.975, 1) = 12.7062, s = 0.7071, n = 2
        let h = confidence_halfwidth(&[1.0, 2.0], 0.95);
        assert!((h - 12.706_204_736 * 0.5).abs() < 1e-6, "{h}");
        assert_eq!(confidence_halfwidth(&[3.0; 5], 0.95), 0.0);
    }

    #[test]
    fn deterministic_across_thread_pools() {
        let sc = scenario(
            TddPolicy::Dynamic { dl_fraction: 0.5 },
            TrafficConfig::new(0.05, 0.05),
        );
        let sim = section(2000, 4);
        let a = run_replications(&sc, &sim, 0.5).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let b = pool.install(|| run_replications(&sc, &sim, 0.5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.replications.len(), 4);
        assert!(a.aggregate.dl_ci_halfwidth.is_finite());
    }

    #[test]
    fn degenerate_seeds_are_retried_then_reported() {
        let mut sc = scenario(
            TddPolicy::Static { dl_fraction: 0.5 },
            TrafficConfig::new(0.05, 0.05),
        );
        sc.network.sap_density = 1e-12;
        let sim = section(100, 2);
        assert!(matches!(
            run_replications(&sc, &sim, 0.5),
            Err(SimError::DegenerateDeployment { .. })
        ));
    }

    #[test]
    fn unstable_queue_throughput_decays_with_horizon() {
        let sc = scenario(
            TddPolicy::Static { dl_fraction: 0.5 },
            TrafficConfig::new(0.6, 0.6),
        );
        let short = run_replications(&sc, &section(10_000, 2), 0.5).unwrap();
        let long = run_replications(&sc, &section(100_000, 2), 0.5).unwrap();
        assert!(long.aggregate.dl_throughput < short.aggregate.dl_throughput);
        assert!(long.aggregate.ul_throughput < short.aggregate.ul_throughput);
    }
}
