use serde::Serialize;

use super::SimError;
use crate::report::{Direction, ThroughputReport};

/// Packet accounting for one queue, restricted to packets that arrived
/// after the warm-up slot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct QueueStats {
    pub arrivals: u64,
    pub delivered: u64,
    pub delay_sum: u64,
    /// Packets still queued at the horizon.
    pub pending: u64,
    pub pending_arrival_sum: u64,
}

impl QueueStats {
    /// Total time spent in the system by measured packets, charging each
    /// undelivered packet the time elapsed up to `horizon`.
    pub fn total_sojourn(&self, horizon: u64) -> u64 {
        self.delay_sum + self.pending * horizon - self.pending_arrival_sum
    }

    pub fn mean_delay(&self) -> Option<f64> {
        (self.delivered > 0).then(|| self.delay_sum as f64 / self.delivered as f64)
    }
}

/// A measured SAP-UE link: both endpoints lie in the inner disk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkRecord {
    pub ue: usize,
    pub sap: usize,
    /// Number of UEs served by `sap`.
    pub cell_load: usize,
    pub dl: QueueStats,
    pub ul: QueueStats,
}

impl LinkRecord {
    pub fn stats(&self, dir: Direction) -> &QueueStats {
        match dir {
            Direction::Dl => &self.dl,
            Direction::Ul => &self.ul,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LinkCounters {
    pub attempts: u64,
    pub successes: u64,
    /// Interfering SAP transmitters summed over all attempts.
    pub sap_interferers: u64,
    /// Interfering UE transmitters summed over all attempts.
    pub ue_interferers: u64,
}

impl LinkCounters {
    pub fn success_ratio(&self) -> Option<f64> {
        (self.attempts > 0).then(|| self.successes as f64 / self.attempts as f64)
    }
}

/// Busy-slot counts of measured SAPs, indexed by the number of UEs served.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TierBusy {
    /// Slots spent in the direction.
    pub slots: Vec<u64>,
    /// Of those, slots with a transmission.
    pub active: Vec<u64>,
}

impl TierBusy {
    pub(crate) fn with_tiers(n: usize) -> Self {
        Self {
            slots: vec![0; n],
            active: vec![0; n],
        }
    }

    pub fn fraction(&self, tier: usize) -> Option<f64> {
        let s = *self.slots.get(tier)?;
        (s > 0).then(|| self.active[tier] as f64 / s as f64)
    }

    pub fn overall(&self) -> Option<f64> {
        let s: u64 = self.slots.iter().sum();
        let a: u64 = self.active.iter().sum();
        (s > 0).then(|| a as f64 / s as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimMetrics {
    pub slots: u64,
    pub warmup: u64,
    pub links: Vec<LinkRecord>,
    pub dl: LinkCounters,
    pub ul: LinkCounters,
    pub dl_busy: TierBusy,
    pub ul_busy: TierBusy,
    /// Slots carrying both DL and UL transmissions anywhere in the region.
    pub mixed_slots: u64,
    /// Whole-region packet accounting, used for conservation checks.
    pub total_arrivals: u64,
    pub total_delivered: u64,
    pub queued_at_end: u64,
}

impl SimMetrics {
    pub fn counters(&self, dir: Direction) -> &LinkCounters {
        match dir {
            Direction::Dl => &self.dl,
            Direction::Ul => &self.ul,
        }
    }

    pub fn busy(&self, dir: Direction) -> &TierBusy {
        match dir {
            Direction::Dl => &self.dl_busy,
            Direction::Ul => &self.ul_busy,
        }
    }
}

/// Per-UE throughput `A / (sum of sojourn times)`, averaged over measured
/// UEs that saw at least one arrival. Undelivered packets count the time
/// elapsed up to `horizon`, so an unstable queue drives its UE towards zero.
pub fn per_ue_throughput(metrics: &SimMetrics, dir: Direction, horizon: u64) -> Option<f64> {
    let horizon = horizon.max(metrics.slots);
    let mut sum = 0.0;
    let mut n = 0usize;
    for link in &metrics.links {
        let q = link.stats(dir);
        if q.arrivals == 0 {
            continue;
        }
        sum += q.arrivals as f64 / q.total_sojourn(horizon) as f64;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

/// Summarizes one run. A direction without any measured arrival reports
/// zero throughput and sets the `<dir>_no_arrivals` diagnostic.
pub fn measure_throughput(
    metrics: &SimMetrics,
    horizon: u64,
) -> Result<ThroughputReport, SimError> {
    if metrics.links.is_empty() {
        return Err(SimError::NoMeasuredUes);
    }
    let mut values = [0.0; 2];
    let mut report = ThroughputReport::new(0.0, 0.0);
    for (i, dir) in Direction::BOTH.into_iter().enumerate() {
        let tag = dir.as_str().to_ascii_lowercase();
        match per_ue_throughput(metrics, dir, horizon) {
            Some(v) => values[i] = v,
            None => report = report.with(&format!("{tag}_no_arrivals"), 1.0),
        }
        let c = metrics.counters(dir);
        if let Some(r) = c.success_ratio() {
            report = report.with(&format!("{tag}_service_rate"), r);
        }
        if let Some(b) = metrics.busy(dir).overall() {
            report = report.with(&format!("{tag}_busy_fraction"), b);
        }
        let delivered: u64 = metrics.links.iter().map(|l| l.stats(dir).delivered).sum();
        let delay: u64 = metrics.links.iter().map(|l| l.stats(dir).delay_sum).sum();
        if delivered > 0 {
            report = report.with(
                &format!("{tag}_mean_delay"),
                delay as f64 / delivered as f64,
            );
        }
    }
    report.dl_throughput = values[0];
    report.ul_throughput = values[1];
    let measured_slots = (metrics.slots - metrics.warmup).max(1) as f64;
    Ok(report
        .with("measured_links", metrics.links.len() as f64)
        .with(
            "mixed_slot_fraction",
            metrics.mixed_slots as f64 / metrics.slots.max(1) as f64,
        )
        .with("measured_slots", measured_slots))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn link(dl: QueueStats, ul: QueueStats) -> LinkRecord {
        LinkRecord {
            ue: 0,
            sap: 0,
            cell_load: 1,
            dl,
            ul,
        }
    }

    fn metrics(links: Vec<LinkRecord>) -> SimMetrics {
        SimMetrics {
            slots: 100,
            warmup: 0,
            links,
            dl: LinkCounters::default(),
            ul: LinkCounters::default(),
            dl_busy: TierBusy::default(),
            ul_busy: TierBusy::default(),
            mixed_slots: 0,
            total_arrivals: 0,
            total_delivered: 0,
            queued_at_end: 0,
        }
    }

    #[test]
    fn throughput_is_inverse_mean_delay() {
        let q = QueueStats {
            arrivals: 4,
            delivered: 4,
            delay_sum: 10,
            ..Default::default()
        };
        let m = metrics(vec![link(q, QueueStats::default())]);
        let r = measure_throughput(&m, 100).unwrap();
        assert!((r.dl_throughput - 0.4).abs() < 1e-15);
        assert_eq!(r.ul_throughput, 0.0);
        assert_eq!(r.diag("ul_no_arrivals"), Some(1.0));
        assert_eq!(r.diag("dl_mean_delay"), Some(2.5));
    }

    #[test]
    fn pending_packets_are_charged_elapsed_time() {
        let q = QueueStats {
            arrivals: 2,
            delivered: 1,
            delay_sum: 1,
            pending: 1,
            pending_arrival_sum: 90,
        };
        assert_eq!(q.total_sojourn(100), 11);
        assert_eq!(q.total_sojourn(1000), 911);
        let m = metrics(vec![link(q, q)]);
        let a = per_ue_throughput(&m, Direction::Dl, 100).unwrap();
        let b = per_ue_throughput(&m, Direction::Dl, 1000).unwrap();
        assert!(b < a);
    }

    #[test]
    fn averages_over_ues_not_packets() {
        let busy = QueueStats {
            arrivals: 100,
            delivered: 100,
            delay_sum: 100,
            ..Default::default()
        };
        let slow = QueueStats {
            arrivals: 1,
            delivered: 1,
            delay_sum: 4,
            ..Default::default()
        };
        let m = metrics(vec![link(busy, busy), link(slow, slow)]);
        let t = per_ue_throughput(&m, Direction::Ul, 100).unwrap();
        assert!((t - 0.625).abs() < 1e-15);
    }

    #[test]
    fn no_measured_links_is_an_error() {
        assert!(matches!(
            measure_throughput(&metrics(vec![]), 100),
            Err(SimError::NoMeasuredUes)
        ));
    }
}
