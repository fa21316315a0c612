use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Mean packet throughput per direction, in packets per slot, with named
/// diagnostics. Confidence half-widths are zero for analytical results.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ThroughputReport {
    pub dl_throughput: f64,
    pub ul_throughput: f64,
    pub dl_ci_halfwidth: f64,
    pub ul_ci_halfwidth: f64,
    pub diagnostics: BTreeMap<String, f64>,
}

impl ThroughputReport {
    pub fn new(dl_throughput: f64, ul_throughput: f64) -> Self {
        Self {
            dl_throughput,
            ul_throughput,
            ..Self::default()
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_owned(), value);
        self
    }

    pub fn diag(&self, key: &str) -> Option<f64> {
        self.diagnostics.get(key).copied()
    }

    pub fn throughput(&self, dir: Direction) -> f64 {
        match dir {
            Direction::Dl => self.dl_throughput,
            Direction::Ul => self.ul_throughput,
        }
    }

    pub fn ci_halfwidth(&self, dir: Direction) -> f64 {
        match dir {
            Direction::Dl => self.dl_ci_halfwidth,
            Direction::Ul => self.ul_ci_halfwidth,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Direction {
    Dl,
    Ul,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Dl, Direction::Ul];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Dl => "DL",
            Direction::Ul => "UL",
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
