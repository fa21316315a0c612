//! Static TDD: every SAP uses the same direction in a slot.

use crate::config::{NetworkConfig, TrafficConfig};
use crate::report::ThroughputReport;

use super::{
    activity_probability, geo_g1_idle_prob, geo_g1_throughput, mean_load, AnalysisError,
    CellLoadPmf, InterferenceFactors, ServiceRates,
};

/// `clamp(1 - load / share, 0, 1)`, the solution of
/// `mu = (1 + load / (share * mu))^{-1}`.
fn slot_service_rate(load: f64, share: f64) -> f64 {
    if load <= 0.0 {
        1.0
    } else if share <= 0.0 {
        0.0
    } else {
        (1.0 - load / share).clamp(0.0, 1.0)
    }
}

pub(crate) fn stdd_rates_with(
    f: &InterferenceFactors,
    traffic: &TrafficConfig,
    p_s: f64,
    pmf: &CellLoadPmf,
) -> ServiceRates {
    let load = mean_load(pmf);
    ServiceRates {
        dl: slot_service_rate(load * traffic.dl_rate * f.z, p_s),
        ul: slot_service_rate(load * traffic.ul_rate * f.v, 1.0 - p_s),
    }
}

/// Per-slot success probabilities under static TDD with DL fraction `p_s`:
/// `dl = 1 - E[N] xi_D Z / p_s`, `ul = 1 - E[N] xi_U V / (1 - p_s)`, both
/// clamped to `[0, 1]`.
pub fn stdd_service_rates(
    net: &NetworkConfig,
    traffic: &TrafficConfig,
    p_s: f64,
    pmf: &CellLoadPmf,
) -> Result<ServiceRates, AnalysisError> {
    let f = InterferenceFactors::new(net.sir_threshold, net.path_loss_exp)?;
    Ok(stdd_rates_with(&f, traffic, p_s, pmf))
}

/// `Σ_i f(i) · geo_g1_throughput(xi, share · mu, i)`, zero without arrivals.
fn tier_sum(pmf: &CellLoadPmf, xi: f64, effective_mu: f64) -> f64 {
    if xi == 0.0 {
        return 0.0;
    }
    pmf.loaded_tiers()
        .map(|(i, f)| f * geo_g1_throughput(xi, effective_mu, i))
        .sum()
}

/// Served-UE weighted idle probability and per-SAP activity for one
/// direction with slot share `share` and success probability `mu`.
fn queue_diagnostics(pmf: &CellLoadPmf, xi: f64, share: f64, mu: f64) -> (f64, f64) {
    let load = mean_load(pmf);
    let mut idle = 0.0;
    let mut active = 0.0;
    for (i, f) in pmf.loaded_tiers() {
        let effective = share * mu;
        let tau0 = if xi == 0.0 {
            1.0
        } else if effective > 0.0 {
            geo_g1_idle_prob(xi, effective, i).unwrap_or(0.0)
        } else {
            0.0
        };
        idle += i as f64 * f * tau0;
        active +=
            f * activity_probability(i, xi, share, mu).unwrap_or(if xi > 0.0 { 1.0 } else { 0.0 });
    }
    let idle = if load > 0.0 { idle / load } else { 1.0 };
    (idle, active)
}

pub(crate) fn stdd_throughput_with(
    f: &InterferenceFactors,
    traffic: &TrafficConfig,
    p_s: f64,
    pmf: &CellLoadPmf,
) -> ThroughputReport {
    let rates = stdd_rates_with(f, traffic, p_s, pmf);
    let dl = tier_sum(pmf, traffic.dl_rate, p_s * rates.dl);
    let ul = tier_sum(pmf, traffic.ul_rate, (1.0 - p_s) * rates.ul);
    let (idle_dl, act_dl) = queue_diagnostics(pmf, traffic.dl_rate, p_s, rates.dl);
    let (idle_ul, act_ul) = queue_diagnostics(pmf, traffic.ul_rate, 1.0 - p_s, rates.ul);
    ThroughputReport::new(dl, ul)
        .with("dl_fraction", p_s)
        .with("mean_load", mean_load(pmf))
        .with("mu_dl", rates.dl)
        .with("mu_ul", rates.ul)
        .with("idle_dl", idle_dl)
        .with("idle_ul", idle_ul)
        .with("activity_dl", act_dl)
        .with("activity_ul", act_ul)
        .with("v_factor", f.v)
        .with("z_factor", f.z)
}

/// Mean UL/DL packet throughput under static TDD, evaluated as the
/// load-tier sum of single-queue throughputs with effective service rate
/// `p_s · mu_dl` (DL) and `(1 - p_s) · mu_ul` (UL).
pub fn stdd_throughput(
    net: &NetworkConfig,
    traffic: &TrafficConfig,
    p_s: f64,
    pmf: &CellLoadPmf,
) -> Result<ThroughputReport, AnalysisError> {
    let f = InterferenceFactors::new(net.sir_threshold, net.path_loss_exp)?;
    Ok(stdd_throughput_with(&f, traffic, p_s, pmf))
}

/// The same quantity written out term by term:
/// `Σ_i f(i) {(share/i - xi (1 + E[N] F / i))}_+ / (1 - xi)` with `F = Z`
/// for DL and `F = V` for UL. Returns `(dl, ul)`.
pub fn stdd_throughput_explicit(
    net: &NetworkConfig,
    traffic: &TrafficConfig,
    p_s: f64,
    pmf: &CellLoadPmf,
) -> Result<(f64, f64), AnalysisError> {
    let f = InterferenceFactors::new(net.sir_threshold, net.path_loss_exp)?;
    let load = mean_load(pmf);
    let direction = |share: f64, xi: f64, factor: f64| -> f64 {
        if xi == 0.0 {
            return 0.0;
        }
        pmf.loaded_tiers()
            .map(|(i, fi)| {
                let i = i as f64;
                fi * (share / i - xi * (1.0 + load * factor / i)).max(0.0) / (1.0 - xi)
            })
            .sum()
    };
    Ok((
        direction(p_s, traffic.dl_rate, f.z),
        direction(1.0 - p_s, traffic.ul_rate, f.v),
    ))
}
