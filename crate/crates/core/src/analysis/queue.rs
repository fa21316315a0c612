//! Single-queue results for Bernoulli arrivals when `n` queues share one
//! server that picks a queue uniformly at random each slot.

use crate::config::TrafficConfig;

use super::AnalysisError;

/// Mean packet throughput (inverse mean delay) of one of `n` queues whose
/// server succeeds with probability `mu` per slot:
/// `max((mu/n - xi) / (1 - xi), 0)`. Zero on and beyond the stability
/// boundary; `1` for the saturated-but-perfect corner `xi = mu/n = 1`.
pub fn geo_g1_throughput(xi: f64, mu: f64, n: usize) -> f64 {
    let service = mu / n as f64;
    if xi >= 1.0 {
        return if service >= 1.0 { 1.0 } else { 0.0 };
    }
    ((service - xi) / (1.0 - xi)).max(0.0)
}

/// Stationary probability that the queue is empty: `max(1 - n xi / mu, 0)`.
pub fn geo_g1_idle_prob(xi: f64, mu: f64, n: usize) -> Result<f64, AnalysisError> {
    if xi == 0.0 {
        return Ok(1.0);
    }
    if mu <= 0.0 {
        return Err(AnalysisError::Domain(format!(
            "idle probability undefined for mu = {mu} with xi = {xi} > 0"
        )));
    }
    Ok((1.0 - n as f64 * xi / mu).max(0.0))
}

/// Probability that a SAP with `k` served UEs finds its scheduled queue
/// non-empty in a slot of the matching direction: `min(k xi / (p mu), 1)`.
pub fn activity_probability(k: usize, xi: f64, p: f64, mu: f64) -> Result<f64, AnalysisError> {
    if !(mu > 0.0) || !(p > 0.0) {
        return Err(AnalysisError::Domain(format!(
            "activity needs p > 0 and mu > 0 (got p = {p}, mu = {mu})"
        )));
    }
    Ok((k as f64 * xi / (p * mu)).min(1.0))
}

/// DL time fraction balancing per-direction load, `xi_D / (xi_U + xi_D)`.
pub fn optimal_dl_fraction(traffic: &TrafficConfig) -> Result<f64, AnalysisError> {
    let total = traffic.total();
    if !(total > 0.0) {
        return Err(AnalysisError::Domain(
            "DL fraction undefined when both arrival rates are zero".into(),
        ));
    }
    Ok(traffic.dl_rate / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles;
    use proptest::prelude::*;

    #[test]
    fn perfect_service_gives_unit_throughput() {
        for xi in [0.0, 0.1, 0.5, 0.99] {
            assert!((geo_g1_throughput(xi, 1.0, 1) - 1.0).abs() < 1e-15);
        }
        assert_eq!(geo_g1_throughput(1.0, 1.0, 1), 1.0);
        assert_eq!(geo_g1_throughput(1.0, 0.9, 1), 0.0);
    }

    #[test]
    fn stability_boundary_clamps_to_zero() {
        assert_eq!(geo_g1_throughput(0.25, 0.5, 2), 0.0);
        assert_eq!(geo_g1_throughput(0.3, 0.5, 2), 0.0);
        assert_eq!(geo_g1_idle_prob(0.3, 0.5, 2).unwrap(), 0.0);
    }

    #[test]
    fn reference_point_against_chain() {
        let t = geo_g1_throughput(0.1, 0.5, 2);
        assert!((t - 0.15 / 0.9).abs() < 1e-15);
        let idle = geo_g1_idle_prob(0.1, 0.5, 2).unwrap();
        assert!((idle - 0.6).abs() < 1e-15);
        let chain = oracles::geo_g1_chain_adaptive(0.1, 0.25).unwrap();
        assert!((chain.throughput - t).abs() / t < 0.02);
        assert!((chain.idle_prob() - idle).abs() / idle < 0.02);
    }

    #[test]
    fn idle_probability_edges() {
        assert_eq!(geo_g1_idle_prob(0.0, 0.0, 3).unwrap(), 1.0);
        assert!(geo_g1_idle_prob(0.1, 0.0, 3).is_err());
    }

    #[test]
    fn activity_examples() {
        assert_eq!(activity_probability(3, 0.0, 0.5, 0.8).unwrap(), 0.0);
        assert_eq!(activity_probability(2, 0.2, 0.5, 0.8).unwrap(), 1.0);
        assert!((activity_probability(2, 0.02, 0.5, 0.8).unwrap() - 0.1).abs() < 1e-15);
        assert!(activity_probability(2, 0.02, 0.0, 0.8).is_err());
        assert!(activity_probability(2, 0.02, 0.5, 0.0).is_err());
    }

    #[test]
    fn dl_fraction_examples() {
        let f = |u, d| optimal_dl_fraction(&TrafficConfig::new(u, d));
        assert_eq!(f(0.02, 0.02).unwrap(), 0.5);
        assert_eq!(f(0.0, 0.3).unwrap(), 1.0);
        assert!((f(0.02, 0.08).unwrap() - 0.8).abs() < 1e-15);
        assert!(f(0.0, 0.0).is_err());
    }

    #[test]
    fn dl_fraction_minimizes_imbalance_on_grid() {
        for (u, d) in [(0.02, 0.08), (0.02, 0.02), (0.05, 0.01), (0.013, 0.07)] {
            let closed = optimal_dl_fraction(&TrafficConfig::new(u, d)).unwrap();
            let grid = oracles::dl_fraction_grid_search(u, d);
            assert!(
                (closed - grid).abs() <= 0.001,
                "{u} {d}: {closed} vs {grid}"
            );
        }
    }

    proptest! {
        #[test]
        fn closed_form_matches_chain_oracle(s in 0.05f64..1.0, frac in 0.02f64..0.95) {
            let xi = s * frac;
            let chain = oracles::geo_g1_chain_adaptive(xi, s).unwrap();
            prop_assert!((geo_g1_throughput(xi, s, 1) - chain.throughput).abs() < 1e-6);
            prop_assert!((geo_g1_idle_prob(xi, s, 1).unwrap() - chain.idle_prob()).abs() < 1e-6);
        }
    }
}
