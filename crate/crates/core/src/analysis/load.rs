use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::AnalysisError;

/// Shape parameter of the gamma approximation to the Voronoi cell area.
pub const VORONOI_SHAPE: f64 = 3.5;

/// Distribution of the number of served UEs per SAP, truncated at the cap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellLoadPmf {
    /// `probs[i]` for `i = 0..=cap`; the last entry holds all mass at or
    /// above the cap.
    pub probs: Vec<f64>,
    /// SAP-to-UE density ratio.
    pub rho: f64,
    pub shape: f64,
    pub cap: usize,
}

impl CellLoadPmf {
    pub fn get(&self, i: usize) -> f64 {
        self.probs.get(i).copied().unwrap_or(0.0)
    }

    /// `(i, f(i))` for loaded cells, `i = 1..=cap`.
    pub fn loaded_tiers(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs.iter().copied().enumerate().skip(1)
    }
}

/// Log of the untruncated negative-binomial mass
/// `η^η Γ(i+η) ρ^{-i} / (i! Γ(η) (1/ρ + η)^{i+η})`.
fn ln_untruncated(i: usize, rho: f64, eta: f64) -> f64 {
    let i_f = i as f64;
    eta * eta.ln() + ln_gamma(i_f + eta)
        - i_f * rho.ln()
        - ln_gamma(i_f + 1.0)
        - ln_gamma(eta)
        - (i_f + eta) * (1.0 / rho + eta).ln()
}

/// Served-UE count PMF for density ratio `rho = λ_s / λ_u`. Entries below
/// the cap are evaluated in log space; the cap entry is the complement.
pub fn cell_load_pmf(rho: f64, cap: usize) -> Result<CellLoadPmf, AnalysisError> {
    if !(rho > 0.0) || !rho.is_finite() || cap < 1 {
        return Err(AnalysisError::Domain(format!(
            "cell load needs rho > 0 and cap >= 1 (got {rho}, {cap})"
        )));
    }
    let mut probs = Vec::with_capacity(cap + 1);
    for i in 0..cap {
        let p = ln_untruncated(i, rho, VORONOI_SHAPE).exp();
        if !p.is_finite() {
            return Err(AnalysisError::Numerical(format!(
                "cell load mass at i = {i} is not finite"
            )));
        }
        probs.push(p);
    }
    let head: f64 = probs.iter().sum();
    probs.push((1.0 - head).max(0.0));
    Ok(CellLoadPmf {
        probs,
        rho,
        shape: VORONOI_SHAPE,
        cap,
    })
}

/// Mean served-UE count of the truncated distribution.
pub fn mean_load(pmf: &CellLoadPmf) -> f64 {
    pmf.probs
        .iter()
        .enumerate()
        .map(|(i, p)| i as f64 * p)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalization_grid() {
        for rho in [0.01, 0.1, 1.0, 10.0] {
            for cap in [1, 3, 10] {
                let pmf = cell_load_pmf(rho, cap).unwrap();
                assert_eq!(pmf.probs.len(), cap + 1);
                let s: f64 = pmf.probs.iter().sum();
                assert!((s - 1.0).abs() < 1e-9, "rho {rho} cap {cap}: {s}");
                assert!(pmf.probs.iter().all(|&p| p >= 0.0));
            }
        }
    }

    #[test]
    fn reference_point_matches_direct_evaluation() {
        // Direct (non-log) evaluation with Γ(i+η)/Γ(η) = Π_{m<i}(η+m).
        let (rho, eta) = (0.1f64, 3.5f64);
        let pmf = cell_load_pmf(rho, 3).unwrap();
        let base = (eta / (1.0 / rho + eta)).powf(eta);
        let mut rising = 1.0;
        let mut fact = 1.0;
        for i in 0..3 {
            let direct = base * rising / fact * (1.0 / (rho * (1.0 / rho + eta))).powi(i as i32);
            assert!((pmf.probs[i] - direct).abs() < 1e-14, "i = {i}");
            rising *= eta + i as f64;
            fact *= (i + 1) as f64;
        }
        // Reference values at ρ = 0.1, cap 3.
        assert!((pmf.probs[0] - 0.008_872_99).abs() < 1e-8);
        assert!((pmf.probs[3] - 0.929_782_89).abs() < 1e-8);
    }

    #[test]
    fn sparse_users_concentrate_at_zero() {
        let pmf = cell_load_pmf(1e6, 3).unwrap();
        assert!(pmf.probs[0] > 0.9999);
    }

    #[test]
    fn large_counts_do_not_overflow() {
        let pmf = cell_load_pmf(1e-4, 400).unwrap();
        let s: f64 = pmf.probs.iter().sum();
        assert!((s - 1.0).abs() < 1e-9);
        assert!(pmf.probs.iter().all(|p| p.is_finite()));
    }

    #[test]
    fn mean_load_edge_cases() {
        let zero = CellLoadPmf {
            probs: vec![1.0, 0.0, 0.0],
            rho: 1.0,
            shape: VORONOI_SHAPE,
            cap: 2,
        };
        assert_eq!(mean_load(&zero), 0.0);
        let pmf = cell_load_pmf(0.3, 1).unwrap();
        assert_eq!(mean_load(&pmf), pmf.probs[1]);
        let m = mean_load(&cell_load_pmf(0.1, 3).unwrap());
        assert!(m > 0.0 && m <= 3.0);
    }

    #[test]
    fn domain_errors() {
        assert!(cell_load_pmf(0.0, 3).is_err());
        assert!(cell_load_pmf(0.1, 0).is_err());
    }

    proptest! {
        #[test]
        fn pmf_is_a_distribution(rho in 1e-3f64..1e3, cap in 1usize..40) {
            let pmf = cell_load_pmf(rho, cap).unwrap();
            let s: f64 = pmf.probs.iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-9);
            prop_assert!(pmf.probs.iter().all(|&p| p >= 0.0));
            let m = mean_load(&pmf);
            prop_assert!((0.0..=cap as f64).contains(&m));
        }
    }
}
