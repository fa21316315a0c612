//! Globally adaptive composite Gauss–Legendre quadrature.
//!
//! Each panel is integrated with the 5-point Gauss–Legendre rule on the whole
//! panel and on its two halves; the difference is the panel's error
//! estimate. The panel with the largest estimate is split until the summed
//! estimate drops below the tolerance. A semi-infinite range `[a, ∞)` is
//! mapped to `[0, 1)` with `u = a + (t / (1 - t))^4`, which turns an
//! algebraic tail `u^-p` with `p > 5/4` into a bounded integrand; the open
//! rule never evaluates the endpoint.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::OracleError;

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_663_99,
    -0.538_469_310_105_683_09,
    0.0,
    0.538_469_310_105_683_09,
    0.906_179_845_938_663_99,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_09,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_89,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_09,
];

const MAX_PANELS: usize = 200_000;

fn gl5<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL5_NODES
        .iter()
        .zip(GL5_WEIGHTS.iter())
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    err: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64) -> Self {
        let m = 0.5 * (a + b);
        let left = gl5(f, a, m);
        let right = gl5(f, m, b);
        Panel {
            a,
            b,
            left,
            right,
            err: (left + right - whole).abs(),
        }
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integrates `f` over `[a, b]`, where `b` may be `f64::INFINITY`, to an
/// estimated absolute error of `tol`.
pub fn quadrature<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, OracleError> {
    quadrature_with_panels(f, a, b, tol, 1)
}

/// As [`quadrature`], starting from `initial_panels` equal panels.
pub fn quadrature_with_panels<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    initial_panels: usize,
) -> Result<f64, OracleError> {
    if !(tol > 0.0) || initial_panels == 0 || a.is_nan() || b.is_nan() || a.is_infinite() {
        return Err(OracleError::Domain(format!(
            "quadrature over [{a}, {b}] with tol {tol}, {initial_panels} panels"
        )));
    }
    if b == f64::INFINITY {
        let g = |t: f64| {
            let s = 1.0 - t;
            let r = t / s;
            let r3 = r * r * r;
            f(a + r3 * r) * 4.0 * r3 / (s * s)
        };
        adaptive(&g, 0.0, 1.0, tol, initial_panels)
    } else if b < a {
        adaptive(&f, b, a, tol, initial_panels).map(|v| -v)
    } else {
        adaptive(&f, a, b, tol, initial_panels)
    }
}

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    initial_panels: usize,
) -> Result<f64, OracleError> {
    if a == b {
        return Ok(0.0);
    }
    let width = (b - a) / initial_panels as f64;
    let mut heap = BinaryHeap::new();
    for i in 0..initial_panels {
        let lo = a + width * i as f64;
        let hi = if i + 1 == initial_panels {
            b
        } else {
            lo + width
        };
        heap.push(Panel::new(f, lo, hi, gl5(f, lo, hi)));
    }
    let mut panels = initial_panels;
    loop {
        let total_err: f64 = heap.iter().map(|p| p.err).sum();
        if !total_err.is_finite() {
            return Err(OracleError::Convergence {
                what: "quadrature: non-finite integrand",
            });
        }
        if total_err <= tol {
            // Sum smallest-first for a little less rounding.
            let mut vals: Vec<f64> = heap.iter().map(Panel::value).collect();
            vals.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
            return Ok(vals.iter().sum());
        }
        if panels >= MAX_PANELS {
            return Err(OracleError::Convergence {
                what: "quadrature: panel limit reached",
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) {
            return Err(OracleError::Convergence {
                what: "quadrature: panel width underflow",
            });
        }
        heap.push(Panel::new(f, worst.a, m, worst.left));
        heap.push(Panel::new(f, m, worst.b, worst.right));
        panels += 1;
    }
}
