use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Geometric};
use serde::Serialize;

use super::association::{nearest_index, Association};
use super::deployment::{Deployment, Point};
use super::metrics::{LinkCounters, LinkRecord, QueueStats, SimMetrics, TierBusy};
use super::rng::{stream, Stream};
use super::SimError;
use crate::config::{NetworkConfig, TddPolicy, TrafficConfig};
use crate::report::Direction;

/// Path gains are cached in a dense matrix up to this many nodes and
/// recomputed on demand beyond it.
const GAIN_CACHE_NODES: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimSettings {
    pub slots: u64,
    pub warmup: u64,
    pub seed: u64,
    /// Links are measured when both endpoints lie within this fraction of
    /// the region radius.
    pub measure_fraction: f64,
}

impl SimSettings {
    pub fn new(slots: u64, warmup: u64, seed: u64) -> Self {
        Self {
            slots,
            warmup,
            seed,
            measure_fraction: 0.5,
        }
    }

    fn check(&self) -> Result<(), SimError> {
        if self.slots == 0 || self.warmup >= self.slots {
            return Err(SimError::InvalidInput(format!(
                "need slots > warmup (slots={}, warmup={})",
                self.slots, self.warmup
            )));
        }
        if !(self.measure_fraction > 0.0 && self.measure_fraction <= 1.0) {
            return Err(SimError::InvalidInput(format!(
                "measure fraction must be in (0, 1] (got {})",
                self.measure_fraction
            )));
        }
        Ok(())
    }
}

struct Gains {
    positions: Vec<Point>,
    alpha: f64,
    cache: Option<Vec<f64>>,
}

impl Gains {
    fn new(positions: Vec<Point>, alpha: f64) -> Self {
        let n = positions.len();
        let cache = (n <= GAIN_CACHE_NODES).then(|| {
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let g = path_gain(positions[i].dist(&positions[j]), alpha);
                    m[i * n + j] = g;
                    m[j * n + i] = g;
                }
            }
            m
        });
        Self {
            positions,
            alpha,
            cache,
        }
    }

    #[inline]
    fn get(&self, tx: usize, rx: usize) -> f64 {
        match &self.cache {
            Some(m) => m[tx * self.positions.len() + rx],
            None => path_gain(self.positions[tx].dist(&self.positions[rx]), self.alpha),
        }
    }
}

#[inline]
fn path_gain(d: f64, alpha: f64) -> f64 {
    d.powf(-alpha)
}

struct Link {
    sap: usize,
    ue: usize,
    measured: bool,
    queues: [VecDeque<u64>; 2],
    stats: [QueueStats; 2],
}

#[derive(Clone, Copy)]
struct Tx {
    link: usize,
    dir: Direction,
    tx: usize,
    rx: usize,
    power: f64,
}

fn dir_index(d: Direction) -> usize {
    match d {
        Direction::Dl => 0,
        Direction::Ul => 1,
    }
}

struct Arrivals {
    heap: BinaryHeap<Reverse<(u64, usize, usize)>>,
    gaps: [Option<Geometric>; 2],
    rngs: [ChaCha8Rng; 2],
}

impl Arrivals {
    fn new(n_links: usize, traffic: &TrafficConfig, seed: u64) -> Self {
        let geo = |p: f64| (p > 0.0).then(|| Geometric::new(p).expect("rate in (0, 1]"));
        let mut a = Self {
            heap: BinaryHeap::new(),
            gaps: [geo(traffic.dl_rate), geo(traffic.ul_rate)],
            rngs: [
                stream(seed, Stream::DlArrivals),
                stream(seed, Stream::UlArrivals),
            ],
        };
        for d in 0..2 {
            for l in 0..n_links {
                a.schedule(l, d, 0);
            }
        }
        a
    }

    /// Queues the next arrival of `(link, dir)` at or after slot `from`.
    fn schedule(&mut self, link: usize, dir: usize, from: u64) {
        if let Some(g) = &self.gaps[dir] {
            let skip = g.sample(&mut self.rngs[dir]);
            if let Some(at) = from.checked_add(skip) {
                self.heap.push(Reverse((at, link, dir)));
            }
        }
    }

    fn pop_due(&mut self, slot: u64) -> Option<(usize, usize)> {
        match self.heap.peek() {
            Some(Reverse((at, l, d))) if *at == slot => {
                let out = (*l, *d);
                self.heap.pop();
                Some(out)
            }
            _ => None,
        }
    }
}

/// Runs the slotted system on a fixed deployment and association.
///
/// Each slot: pick directions, let every SAP with served UEs pick one of
/// them uniformly, transmit the head packet of the matching queue if any,
/// resolve SIR with fresh Rayleigh fading, remove delivered packets, then
/// add new arrivals. A packet arriving in slot `n` and delivered in slot `m`
/// has delay `m - n`.
pub fn run_simulation(
    dep: &Deployment,
    assoc: &Association,
    net: &NetworkConfig,
    traffic: &TrafficConfig,
    policy: &TddPolicy,
    settings: &SimSettings,
) -> Result<SimMetrics, SimError> {
    settings.check()?;
    let n_sap = dep.sap_positions.len();
    let inner = settings.measure_fraction * dep.region_radius;
    let inside = |p: &Point| p.norm() <= inner;

    let mut links: Vec<Link> = Vec::new();
    let mut sap_links: Vec<Vec<usize>> = vec![Vec::new(); n_sap];
    let mut positions = dep.sap_positions.clone();
    for (s, ues) in assoc.served.iter().enumerate() {
        for &u in ues {
            sap_links[s].push(links.len());
            links.push(Link {
                sap: s,
                ue: u,
                measured: inside(&dep.sap_positions[s]) && inside(&dep.ue_positions[u]),
                queues: [VecDeque::new(), VecDeque::new()],
                stats: [QueueStats::default(); 2],
            });
            positions.push(dep.ue_positions[u]);
        }
    }
    let ue_node = |l: usize| n_sap + l;
    let gains = Gains::new(positions, net.path_loss_exp);
    let active_saps: Vec<usize> = (0..n_sap).filter(|&s| !sap_links[s].is_empty()).collect();
    let measured_sap: Vec<bool> = dep.sap_positions.iter().map(inside).collect();
    let tiers = sap_links.iter().map(Vec::len).max().unwrap_or(0) + 1;

    let mut dir_rng = stream(settings.seed, Stream::Direction);
    let mut pick_rng = stream(settings.seed, Stream::Scheduling);
    let mut fade_rng = stream(settings.seed, Stream::Fading);
    let mut arrivals = Arrivals::new(links.len(), traffic, settings.seed);
    let p_dl = policy.dl_fraction();
    let dynamic = policy.is_dynamic();

    let mut counters = [LinkCounters::default(); 2];
    let mut busy = [TierBusy::with_tiers(tiers), TierBusy::with_tiers(tiers)];
    let mut mixed_slots = 0u64;
    let mut total_arrivals = 0u64;
    let mut total_delivered = 0u64;
    let mut txs: Vec<Tx> = Vec::with_capacity(active_saps.len());
    let mut delivered: Vec<usize> = Vec::with_capacity(active_saps.len());

    for slot in 0..settings.slots {
        let counted = slot > settings.warmup;
        let common = (!dynamic).then(|| dir_rng.random_bool(p_dl));
        txs.clear();
        for &s in &active_saps {
            let dl = common.unwrap_or_else(|| dir_rng.random_bool(p_dl));
            let dir = if dl { Direction::Dl } else { Direction::Ul };
            let served = &sap_links[s];
            let l = served[pick_rng.random_range(0..served.len())];
            let has_packet = !links[l].queues[dir_index(dir)].is_empty();
            if counted && measured_sap[s] {
                let b = &mut busy[dir_index(dir)];
                b.slots[served.len()] += 1;
                if has_packet {
                    b.active[served.len()] += 1;
                }
            }
            if has_packet {
                let (tx, rx, power) = match dir {
                    Direction::Dl => (s, ue_node(l), net.sap_power),
                    Direction::Ul => (ue_node(l), s, net.ue_power),
                };
                txs.push(Tx {
                    link: l,
                    dir,
                    tx,
                    rx,
                    power,
                });
            }
        }
        let any_dl = txs.iter().any(|t| t.dir == Direction::Dl);
        let any_ul = txs.iter().any(|t| t.dir == Direction::Ul);
        if any_dl && any_ul {
            mixed_slots += 1;
        }

        delivered.clear();
        for (i, t) in txs.iter().enumerate() {
            let h: f64 = Exp1.sample(&mut fade_rng);
            let signal = t.power * h * gains.get(t.tx, t.rx);
            let mut interference = 0.0;
            let mut from_saps = 0u64;
            for (j, o) in txs.iter().enumerate() {
                if j == i {
                    continue;
                }
                let h: f64 = Exp1.sample(&mut fade_rng);
                interference += o.power * h * gains.get(o.tx, t.rx);
                if o.dir == Direction::Dl {
                    from_saps += 1;
                }
            }
            let ok = signal > net.sir_threshold * interference;
            if ok {
                delivered.push(i);
            }
            if counted && links[t.link].measured {
                let c = &mut counters[dir_index(t.dir)];
                c.attempts += 1;
                c.successes += ok as u64;
                c.sap_interferers += from_saps;
                c.ue_interferers += (txs.len() - 1) as u64 - from_saps;
            }
        }
        for &i in &delivered {
            let t = txs[i];
            let d = dir_index(t.dir);
            let link = &mut links[t.link];
            let arrived = link.queues[d]
                .pop_front()
                .expect("transmitted from non-empty queue");
            total_delivered += 1;
            if link.measured && arrived > settings.warmup {
                let st = &mut link.stats[d];
                st.delivered += 1;
                st.delay_sum += slot - arrived;
            }
        }

        while let Some((l, d)) = arrivals.pop_due(slot) {
            let link = &mut links[l];
            link.queues[d].push_back(slot);
            total_arrivals += 1;
            if link.measured && counted {
                link.stats[d].arrivals += 1;
            }
            arrivals.schedule(l, d, slot + 1);
        }
    }

    let mut queued_at_end = 0u64;
    let mut records = Vec::new();
    for link in &mut links {
        queued_at_end += (link.queues[0].len() + link.queues[1].len()) as u64;
        if !link.measured {
            continue;
        }
        for d in 0..2 {
            for &a in &link.queues[d] {
                if a > settings.warmup {
                    link.stats[d].pending += 1;
                    link.stats[d].pending_arrival_sum += a;
                }
            }
        }
        records.push(LinkRecord {
            ue: link.ue,
            sap: link.sap,
            cell_load: sap_links[link.sap].len(),
            dl: link.stats[0],
            ul: link.stats[1],
        });
    }
    let [dl_busy, ul_busy] = busy;
    Ok(SimMetrics {
        slots: settings.slots,
        warmup: settings.warmup,
        links: records,
        dl: counters[0],
        ul: counters[1],
        dl_busy,
        ul_busy,
        mixed_slots,
        total_arrivals,
        total_delivered,
        queued_at_end,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CoverageCount {
    pub samples: u64,
    pub successes: u64,
}

impl CoverageCount {
    pub fn probability(&self) -> Option<f64> {
        (self.samples > 0).then(|| self.successes as f64 / self.samples as f64)
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            samples: self.samples + other.samples,
            successes: self.successes + other.successes,
        }
    }
}

/// Full-buffer DL: every SAP transmits in every slot. Each UE in the inner
/// disk listens to its nearest SAP while all other SAPs interfere; fading
/// is drawn afresh per slot and per SAP-UE pair.
pub fn full_buffer_dl_coverage(
    dep: &Deployment,
    net: &NetworkConfig,
    slots: u64,
    seed: u64,
    measure_fraction: f64,
) -> CoverageCount {
    let inner = measure_fraction * dep.region_radius;
    let mut rng = stream(seed, Stream::Fading);
    let mut count = CoverageCount::default();
    let mut g = vec![0.0; dep.sap_positions.len()];
    for ue in dep.ue_positions.iter().filter(|p| p.norm() <= inner) {
        let serving = nearest_index(&dep.sap_positions, ue);
        for (gi, s) in g.iter_mut().zip(&dep.sap_positions) {
            *gi = path_gain(s.dist(ue), net.path_loss_exp);
        }
        for _ in 0..slots {
            let mut signal = 0.0;
            let mut interference = 0.0;
            for (i, &gi) in g.iter().enumerate() {
                let h: f64 = Exp1.sample(&mut rng);
                if i == serving {
                    signal = h * gi;
                } else {
                    interference += h * gi;
                }
            }
            count.samples += 1;
            count.successes += (signal > net.sir_threshold * interference) as u64;
        }
    }
    count
}
