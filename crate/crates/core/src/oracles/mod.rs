//! Independent brute-force references for the analytical engine.
//!
//! Nothing in here calls into [`crate::analysis`]; tests and the `validate`
//! command compare the two.

mod chain;
mod quadrature;

pub use chain::{geo_g1_chain, geo_g1_chain_adaptive, ChainSolution, TAIL_LIMIT};
pub use quadrature::{quadrature, quadrature_with_panels};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{what}")]
    Convergence { what: &'static str },
    #[error("truncation at {trunc} leaves tail mass {tail:e}")]
    Truncation { trunc: usize, tail: f64 },
    #[error("queue is unstable: xi = {xi} >= mu = {mu}")]
    Unstable { xi: f64, mu: f64 },
    #[error("domain error: {0}")]
    Domain(String),
}

/// Smallest objective value over an explicit grid; ties keep the first.
pub fn grid_argmin<F, I>(objective: F, grid: I) -> Option<(f64, f64)>
where
    F: Fn(f64) -> f64,
    I: IntoIterator<Item = f64>,
{
    grid.into_iter()
        .map(|x| (x, objective(x)))
        .filter(|(_, v)| !v.is_nan())
        .fold(None, |best, (x, v)| match best {
            Some((_, bv)) if bv <= v => best,
            _ => Some((x, v)),
        })
}

/// The DL time-fraction objective `|xi_D / p - xi_U / (1 - p)|`, minimized
/// over `p = 0.001, 0.002, …, 0.999`.
pub fn dl_fraction_grid_search(ul_rate: f64, dl_rate: f64) -> f64 {
    let objective = |p: f64| (dl_rate / p - ul_rate / (1.0 - p)).abs();
    grid_argmin(objective, (1..1000).map(|k| k as f64 / 1000.0))
        .map(|(p, _)| p)
        .expect("non-empty grid")
}

/// Success probability of a typical UE served by its nearest SAP when every
/// SAP transmits, under Rayleigh fading and PPP placement:
/// `1 / (1 + θ^{2/α} ∫_{θ^{-2/α}}^∞ du / (1 + u^{α/2}))`.
pub fn full_buffer_dl_coverage(theta: f64, alpha: f64) -> Result<f64, OracleError> {
    if !(alpha > 2.0) || !(theta >= 0.0) {
        return Err(OracleError::Domain(format!(
            "coverage needs theta >= 0 and alpha > 2 (got {theta}, {alpha})"
        )));
    }
    if theta == 0.0 {
        return Ok(1.0);
    }
    if theta.is_infinite() {
        return Ok(0.0);
    }
    let scale = theta.powf(2.0 / alpha);
    let integral = quadrature(
        |u| 1.0 / (1.0 + u.powf(alpha / 2.0)),
        1.0 / scale,
        f64::INFINITY,
        1e-12,
    )?;
    Ok(1.0 / (1.0 + scale * integral))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn coverage_reference_and_limits() {
        let c = full_buffer_dl_coverage(1.0, 4.0).unwrap();
        assert!((c - 1.0 / (1.0 + PI / 4.0)).abs() < 1e-10);
        assert!((c - 0.560_099).abs() < 1e-5);
        assert_eq!(full_buffer_dl_coverage(0.0, 3.8).unwrap(), 1.0);
        assert!(full_buffer_dl_coverage(1e-9, 3.8).unwrap() > 0.999);
        assert!(full_buffer_dl_coverage(1e9, 3.8).unwrap() < 1e-3);
        assert!(full_buffer_dl_coverage(1.0, 2.0).is_err());
    }

    #[test]
    fn grid_search_symmetric_and_skewed() {
        assert!((dl_fraction_grid_search(0.02, 0.02) - 0.5).abs() < 1e-12);
        assert!((dl_fraction_grid_search(0.02, 0.08) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn grid_argmin_skips_nan_and_keeps_first_tie() {
        let f = |x: f64| {
            if x < 0.5 {
                f64::NAN
            } else {
                (x - 1.0).abs().max(0.1)
            }
        };
        assert_eq!(
            grid_argmin(f, [0.2, 0.95, 1.0, 1.05, 2.0]),
            Some((0.95, 0.1))
        );
        assert_eq!(grid_argmin(f, [0.2, 2.0, 1.5]), Some((1.5, 0.5)));
        assert_eq!(grid_argmin(|x| x, std::iter::empty()), None);
    }
}
