use rand::seq::SliceRandom;
use serde::Serialize;

use super::deployment::Deployment;
use super::rng::{stream, Stream};

/// Nearest-SAP association with a per-SAP cap. When more than `cap` UEs
/// pick the same SAP, a uniformly random subset of size `cap` is served and
/// the rest are dropped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Association {
    /// Nearest SAP of each UE, regardless of the cap.
    pub nearest: Vec<usize>,
    /// Number of UEs whose nearest SAP is each SAP (the Voronoi cell count).
    pub cell_counts: Vec<usize>,
    /// Served UEs of each SAP, sorted by UE index.
    pub served: Vec<Vec<usize>>,
    /// Serving SAP of each UE, `None` if dropped by the cap.
    pub serving: Vec<Option<usize>>,
}

impl Association {
    pub fn served_count(&self, sap: usize) -> usize {
        self.served[sap].len()
    }

    pub fn dropped(&self) -> usize {
        self.serving.iter().filter(|s| s.is_none()).count()
    }
}

/// Index of the point in `saps` closest to `p`; ties go to the lower index.
pub(crate) fn nearest_index(saps: &[super::Point], p: &super::Point) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, s) in saps.iter().enumerate() {
        let d = s.dist2(p);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

pub fn associate(dep: &Deployment, cap: usize, seed: u64) -> Association {
    let n_sap = dep.sap_positions.len();
    let nearest: Vec<usize> = dep
        .ue_positions
        .iter()
        .map(|u| nearest_index(&dep.sap_positions, u))
        .collect();
    let mut candidates = vec![Vec::new(); n_sap];
    for (ue, &s) in nearest.iter().enumerate() {
        candidates[s].push(ue);
    }
    let cell_counts = candidates.iter().map(Vec::len).collect();

    let mut rng = stream(seed, Stream::Association);
    let mut serving = vec![None; nearest.len()];
    let served: Vec<Vec<usize>> = candidates
        .into_iter()
        .enumerate()
        .map(|(s, mut ues)| {
            if ues.len() > cap {
                ues.partial_shuffle(&mut rng, cap);
                ues.truncate(cap);
                ues.sort_unstable();
            }
            for &u in &ues {
                serving[u] = Some(s);
            }
            ues
        })
        .collect();
    Association {
        nearest,
        cell_counts,
        served,
        serving,
    }
}
