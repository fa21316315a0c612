//! Dynamic TDD: each SAP draws its slot direction independently.
//!
//! Interferer activity couples the DL and UL success probabilities. In
//! reciprocal form, `x = 1/mu_dl` and `y = 1/mu_ul`, the mean-field
//! equations are linear:
//!
//! ```text
//! x = 1 + a_dd x + a_du y        (DL receiver: SAP and UE interferers)
//! y = 1 + a_ud x + a_uu y        (UL receiver: SAP and UE interferers)
//! ```
//!
//! The closed forms in [`dtdd_service_rates`] are the solution of this
//! system with the second-order term `a_dd a_uu - a_ud a_du` dropped from
//! the determinant; [`dtdd_fixed_point`] solves it by iteration.

use serde::Serialize;

use crate::config::{NetworkConfig, TrafficConfig};
use crate::report::ThroughputReport;

use super::{
    geo_g1_idle_prob, mean_load, optimal_dl_fraction, AnalysisError, CellLoadPmf,
    InterferenceFactors, ServiceRates,
};

pub(crate) fn dtdd_rates_with(
    f: &InterferenceFactors,
    net: &NetworkConfig,
    traffic: &TrafficConfig,
    pmf: &CellLoadPmf,
) -> Result<ServiceRates, AnalysisError> {
    let (xu, xd) = (traffic.ul_rate, traffic.dl_rate);
    let s = xu + xd;
    if !(s > 0.0) {
        return Err(AnalysisError::Domain(
            "dynamic TDD service rates need a positive total arrival rate".into(),
        ));
    }
    let load = mean_load(pmf);
    let sap_over_ue = net.power_ratio();
    let ue_over_sap = 1.0 / sap_over_ue;
    let numerator = s - (xd * xd * f.z + xu * xu * f.v) * load;
    let den_ul = s - xd * xd * load * (f.z - f.v * sap_over_ue);
    let den_dl = s - xu * xu * load * f.v * (1.0 - ue_over_sap);
    if den_ul <= 0.0 {
        return Err(AnalysisError::DegenerateDenominator {
            which: "ul",
            value: den_ul,
        });
    }
    if den_dl <= 0.0 {
        return Err(AnalysisError::DegenerateDenominator {
            which: "dl",
            value: den_dl,
        });
    }
    Ok(ServiceRates {
        ul: (numerator / den_ul).clamp(0.0, 1.0),
        dl: (numerator / den_dl).clamp(0.0, 1.0),
    })
}

/// Closed-form DL/UL success probabilities under dynamic TDD with the
/// load-balancing DL fraction:
///
/// ```text
/// mu_ul = (S - [xi_D² Z + xi_U² V] E[N]) / (S - xi_D² E[N] (Z - V P_sap/P_ue))
/// mu_dl = (S - [xi_D² Z + xi_U² V] E[N]) / (S - xi_U² E[N] V (1 - P_ue/P_sap))
/// ```
///
/// with `S = xi_U + xi_D`, clamped to `[0, 1]`. A non-positive denominator
/// is reported, not clamped.
pub fn dtdd_service_rates(
    net: &NetworkConfig,
    traffic: &TrafficConfig,
    pmf: &CellLoadPmf,
) -> Result<ServiceRates, AnalysisError> {
    let f = InterferenceFactors::new(net.sir_threshold, net.path_loss_exp)?;
    dtdd_rates_with(&f, net, traffic, pmf)
}

fn weighted_tier_sum(pmf: &CellLoadPmf, weight: f64, xi: f64, mu: f64) -> f64 {
    if xi == 0.0 || weight == 0.0 {
        return 0.0;
    }
    pmf.loaded_tiers()
        .map(|(k, f)| {
            let inner = if xi >= 1.0 {
                0.0
            } else {
                ((mu / k as f64 - xi) / (1.0 - xi)).max(0.0)
            };
            weight * f * inner
        })
        .sum()
}

pub(crate) fn dtdd_throughput_with(
    f: &InterferenceFactors,
    net: &NetworkConfig,
    traffic: &TrafficConfig,
    pmf: &CellLoadPmf,
) -> Result<ThroughputReport, AnalysisError> {
    let load = mean_load(pmf);
    if traffic.is_idle() {
        return Ok(ThroughputReport::new(0.0, 0.0)
            .with("mean_load", load)
            .with("idle_dl", 1.0)
            .with("idle_ul", 1.0));
    }
    let p_d = optimal_dl_fraction(traffic)?;
    let rates = dtdd_rates_with(f, net, traffic, pmf)?;
    let dl = weighted_tier_sum(pmf, p_d, traffic.dl_rate, rates.dl);
    let ul = weighted_tier_sum(pmf, 1.0 - p_d, traffic.ul_rate, rates.ul);
    let idle = |xi: f64, share: f64, mu: f64| -> f64 {
        if load == 0.0 {
            return 1.0;
        }
        pmf.loaded_tiers()
            .map(|(k, fk)| {
                let eff = share * mu;
                let t = if xi == 0.0 {
                    1.0
                } else if eff > 0.0 {
                    geo_g1_idle_prob(xi, eff, k).unwrap_or(0.0)
                } else {
                    0.0
                };
                k as f64 * fk * t
            })
            .sum::<f64>()
            / load
    };
    Ok(ThroughputReport::new(dl, ul)
        .with("dl_fraction", p_d)
        .with("mean_load", load)
        .with("mu_dl", rates.dl)
        .with("mu_ul", rates.ul)
        .with("idle_dl", idle(traffic.dl_rate, p_d, rates.dl))
        .with("idle_ul", idle(traffic.ul_rate, 1.0 - p_d, rates.ul))
        .with("v_factor", f.v)
        .with("z_factor", f.z))
}

/// Mean UL/DL packet throughput under dynamic TDD:
/// `T_ul = Σ_k (1 - p_D) f(k) {(mu_ul/k - xi_U) / (1 - xi_U)}_+` and
/// `T_dl = Σ_k p_D f(k) {(mu_dl/k - xi_D) / (1 - xi_D)}_+`, with
/// `p_D = xi_D / (xi_U + xi_D)` and the closed-form rates.
pub fn dtdd_throughput(
    net: &NetworkConfig,
    traffic: &TrafficConfig,
    pmf: &CellLoadPmf,
) -> Result<ThroughputReport, AnalysisError> {
    let f = InterferenceFactors::new(net.sir_threshold, net.path_loss_exp)?;
    dtdd_throughput_with(&f, net, traffic, pmf)
}

/// Which UL equation the fixed-point solver uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingSystem {
    /// UL interference terms exactly as first published:
    /// `(1-p_D) xi_D V E[N] / mu_dl` and `p_D xi_D V E[N] (P_sap/P_ue) / mu_ul`.
    Literal,
    /// UE-originated UL interference carries the UL rate and UL activity,
    /// SAP-originated UL interference the DL rate and DL activity:
    /// `(1-p_D) xi_U V E[N] / mu_ul` and `p_D xi_D V E[N] (P_sap/P_ue) / mu_dl`.
    /// This is the system whose first-order solution is the closed form.
    SymmetryCorrected,
}

/// Coefficients of the reciprocal-form system; see the module docs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingCoefficients {
    pub dl_from_dl: f64,
    pub dl_from_ul: f64,
    pub ul_from_dl: f64,
    pub ul_from_ul: f64,
}

impl CouplingCoefficients {
    pub fn new(
        f: &InterferenceFactors,
        net: &NetworkConfig,
        traffic: &TrafficConfig,
        pmf: &CellLoadPmf,
        system: CouplingSystem,
    ) -> Self {
        let (xu, xd) = (traffic.ul_rate, traffic.dl_rate);
        let p_d = optimal_dl_fraction(traffic).unwrap_or(0.5);
        let load = mean_load(pmf);
        let sap_over_ue = net.power_ratio();
        let dl_from_dl = p_d * xd * f.z * load;
        let dl_from_ul = (1.0 - p_d) * xu * f.v * load / sap_over_ue;
        match system {
            CouplingSystem::Literal => Self {
                dl_from_dl,
                dl_from_ul,
                ul_from_dl: (1.0 - p_d) * xd * f.v * load,
                ul_from_ul: p_d * xd * f.v * load * sap_over_ue,
            },
            CouplingSystem::SymmetryCorrected => Self {
                dl_from_dl,
                dl_from_ul,
                ul_from_dl: p_d * xd * f.v * load * sap_over_ue,
                ul_from_ul: (1.0 - p_d) * xu * f.v * load,
            },
        }
    }

    /// The cross term the closed forms leave out of the determinant.
    pub fn second_order_term(&self) -> f64 {
        self.dl_from_dl * self.ul_from_ul - self.ul_from_dl * self.dl_from_ul
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    pub rates: ServiceRates,
    pub iterations: usize,
}

/// Iterates `mu_dl <- 1/(1 + a_dd/mu_dl + a_du/mu_ul)`,
/// `mu_ul <- 1/(1 + a_ud/mu_dl + a_uu/mu_ul)` from `(1, 1)` until
/// successive iterates differ by less than `tol` in max norm.
pub fn dtdd_fixed_point(
    net: &NetworkConfig,
    traffic: &TrafficConfig,
    pmf: &CellLoadPmf,
    tol: f64,
    max_iter: usize,
    system: CouplingSystem,
) -> Result<FixedPoint, AnalysisError> {
    if !(tol > 0.0) {
        return Err(AnalysisError::Domain(format!(
            "tolerance must be positive (got {tol})"
        )));
    }
    let f = InterferenceFactors::new(net.sir_threshold, net.path_loss_exp)?;
    let c = CouplingCoefficients::new(&f, net, traffic, pmf, system);
    let (mut dl, mut ul) = (1.0f64, 1.0f64);
    for it in 1..=max_iter {
        let next_dl = 1.0 / (1.0 + c.dl_from_dl / dl + c.dl_from_ul / ul);
        let next_ul = 1.0 / (1.0 + c.ul_from_dl / dl + c.ul_from_ul / ul);
        if !(next_dl.is_finite() && next_ul.is_finite()) {
            break;
        }
        let step = (next_dl - dl).abs().max((next_ul - ul).abs());
        dl = next_dl;
        ul = next_ul;
        if step < tol {
            return Ok(FixedPoint {
                rates: ServiceRates {
                    dl: dl.clamp(0.0, 1.0),
                    ul: ul.clamp(0.0, 1.0),
                },
                iterations: it,
            });
        }
    }
    Err(AnalysisError::Convergence {
        what: "dynamic TDD service-rate fixed point",
        iterations: max_iter,
    })
}
