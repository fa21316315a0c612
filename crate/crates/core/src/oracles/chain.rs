//! Brute-force stationary solution of the discrete-time single-server queue
//! with Bernoulli arrivals and Bernoulli service.
//!
//! The chain is observed just after the arrival epoch of each slot. From a
//! non-empty state the head packet departs with probability `mu_eff`, then a
//! packet arrives with probability `xi`; from the empty state only the
//! arrival can happen. Transition probabilities are built from those slot
//! dynamics and the cut equations `π(j) up(j) = π(j+1) down(j+1)` are swept
//! up to the truncation level.

use serde::Serialize;

use super::OracleError;

/// Stationary distribution over queue lengths `0..=L` and derived metrics.
#[derive(Debug, Clone, Serialize)]
pub struct ChainSolution {
    pub stationary: Vec<f64>,
    /// Mean number of queued packets at the post-arrival epoch.
    pub mean_queue: f64,
    /// `xi / mean_queue`. By Little's law this is also `1 / mean_delay`.
    pub throughput: f64,
    /// `mean_queue / xi`, in slots.
    pub mean_delay: f64,
}

impl ChainSolution {
    pub fn idle_prob(&self) -> f64 {
        self.stationary[0]
    }

    pub fn truncation(&self) -> usize {
        self.stationary.len() - 1
    }
}

/// Accepted solutions put less than this mass on the truncation state.
pub const TAIL_LIMIT: f64 = 1e-10;

fn up(j: usize, xi: f64, mu: f64) -> f64 {
    if j == 0 {
        xi
    } else {
        xi * (1.0 - mu)
    }
}

fn down(j: usize, xi: f64, mu: f64) -> f64 {
    if j == 0 {
        0.0
    } else {
        mu * (1.0 - xi)
    }
}

/// Solves the chain truncated at `trunc` packets.
pub fn geo_g1_chain(xi: f64, mu_eff: f64, trunc: usize) -> Result<ChainSolution, OracleError> {
    if !(0.0..1.0).contains(&xi) || !(mu_eff > 0.0 && mu_eff <= 1.0) || trunc == 0 {
        return Err(OracleError::Domain(format!(
            "chain needs 0 <= xi < 1, 0 < mu_eff <= 1, trunc >= 1 (got {xi}, {mu_eff}, {trunc})"
        )));
    }
    if xi >= mu_eff {
        return Err(OracleError::Unstable { xi, mu: mu_eff });
    }
    let mut w = Vec::with_capacity(trunc + 1);
    w.push(1.0);
    for j in 0..trunc {
        let next = w[j] * up(j, xi, mu_eff) / down(j + 1, xi, mu_eff);
        w.push(next);
    }
    let total: f64 = w.iter().rev().sum();
    let stationary: Vec<f64> = w.iter().map(|x| x / total).collect();
    let tail = stationary[trunc];
    if tail >= TAIL_LIMIT {
        return Err(OracleError::Truncation { trunc, tail });
    }
    let mean_queue: f64 = stationary
        .iter()
        .enumerate()
        .rev()
        .map(|(j, p)| j as f64 * p)
        .sum();
    let (throughput, mean_delay) = if xi == 0.0 {
        (0.0, 0.0)
    } else {
        (xi / mean_queue, mean_queue / xi)
    };
    Ok(ChainSolution {
        stationary,
        mean_queue,
        throughput,
        mean_delay,
    })
}

/// Doubles the truncation level from 64 until the tail mass is accepted.
pub fn geo_g1_chain_adaptive(xi: f64, mu_eff: f64) -> Result<ChainSolution, OracleError> {
    let mut trunc = 64;
    loop {
        match geo_g1_chain(xi, mu_eff, trunc) {
            Err(OracleError::Truncation { .. }) if trunc < (1 << 26) => trunc *= 2,
            other => return other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_arrivals_is_empty_system() {
        let s = geo_g1_chain(0.0, 0.5, 10).unwrap();
        assert_eq!(s.idle_prob(), 1.0);
        assert_eq!(s.throughput, 0.0);
    }

    #[test]
    fn idle_probability_reference_point() {
        let s = geo_g1_chain_adaptive(0.1, 0.25).unwrap();
        assert!((s.idle_prob() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn near_saturation_idle_vanishes() {
        let s = geo_g1_chain_adaptive(0.2499, 0.25).unwrap();
        assert!(s.idle_prob() < 1e-3);
        assert!(s.truncation() > 64);
    }

    #[test]
    fn perfect_service_single_slot_delay() {
        let s = geo_g1_chain(0.3, 1.0, 8).unwrap();
        assert!((s.mean_delay - 1.0).abs() < 1e-12);
        assert!((s.throughput - 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncation_and_stability_errors() {
        assert!(matches!(
            geo_g1_chain(0.24, 0.25, 100),
            Err(OracleError::Truncation { .. })
        ));
        assert!(matches!(
            geo_g1_chain(0.3, 0.25, 100),
            Err(OracleError::Unstable { .. })
        ));
        assert!(geo_g1_chain(1.0, 0.5, 10).is_err());
    }

    #[test]
    fn stationary_mass_sums_to_one() {
        let s = geo_g1_chain_adaptive(0.07, 0.19).unwrap();
        let total: f64 = s.stationary.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
