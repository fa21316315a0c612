use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use super::rng::{stream, Stream};
use super::SimError;
use crate::config::NetworkConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }
}

/// One realization of the SAP and UE point processes in a disk centred on
/// the origin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deployment {
    pub region_radius: f64,
    pub sap_positions: Vec<Point>,
    pub ue_positions: Vec<Point>,
    pub seed: u64,
}

fn poisson_count<R: Rng>(rng: &mut R, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("positive finite mean");
    let n: f64 = d.sample(rng);
    n as usize
}

fn uniform_in_disk<R: Rng>(rng: &mut R, radius: f64) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let phi = 2.0 * PI * rng.random::<f64>();
    Point {
        x: r * phi.cos(),
        y: r * phi.sin(),
    }
}

/// Draws Poisson(λπR²) SAPs and UEs uniformly in the disk of radius `R`.
/// Deterministic in `seed`.
pub fn generate_deployment(
    net: &NetworkConfig,
    region_radius: f64,
    seed: u64,
) -> Result<Deployment, SimError> {
    if !(region_radius > 0.0) || !region_radius.is_finite() {
        return Err(SimError::InvalidInput(format!(
            "region radius must be positive (got {region_radius})"
        )));
    }
    let area = PI * region_radius * region_radius;
    let mut rng = stream(seed, Stream::Topology);
    let n_sap = poisson_count(&mut rng, net.sap_density * area);
    let n_ue = poisson_count(&mut rng, net.ue_density * area);
    if n_sap == 0 {
        return Err(SimError::DegenerateDeployment { seed });
    }
    let sap_positions = (0..n_sap)
        .map(|_| uniform_in_disk(&mut rng, region_radius))
        .collect();
    let ue_positions = (0..n_ue)
        .map(|_| uniform_in_disk(&mut rng, region_radius))
        .collect();
    Ok(Deployment {
        region_radius,
        sap_positions,
        ue_positions,
        seed,
    })
}
