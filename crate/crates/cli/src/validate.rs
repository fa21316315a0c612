//! Built-in consistency checks. `fast` covers the closed forms against
//! their oracles; `full` adds the Monte Carlo engine and curve shapes.

use std::f64::consts::PI;
use std::fmt;

use clap::ValueEnum;
use rayon::prelude::*;
use tddnet_core::analysis::{
    analyze, cell_load_pmf, geo_g1_idle_prob, geo_g1_throughput, optimal_dl_fraction,
    stdd_throughput, stdd_throughput_explicit, AnalysisError,
};
use tddnet_core::oracles::{
    dl_fraction_grid_search, full_buffer_dl_coverage, geo_g1_chain, geo_g1_chain_adaptive,
    quadrature,
};
use tddnet_core::simulator::{
    associate, full_buffer_dl_coverage as simulated_coverage, generate_deployment,
    run_replications, CoverageCount,
};
use tddnet_core::{NetworkConfig, Scenario, SimulationSection, TddPolicy, TrafficConfig};

use crate::{CliError, Level};

type Factor = fn(f64, f64) -> Result<f64, AnalysisError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mutation {
    /// Scale the UE interference factor by 1.001.
    VFactor,
}

/// The functions under test. A mutation swaps one for a corrupted copy.
#[derive(Clone, Copy)]
pub struct Kernels {
    pub v_factor: Factor,
    pub z_factor: Factor,
}

fn corrupted_v(theta: f64, alpha: f64) -> Result<f64, AnalysisError> {
    tddnet_core::analysis::v_factor(theta, alpha).map(|v| v * 1.001)
}

impl Kernels {
    pub fn reference() -> Self {
        Self {
            v_factor: tddnet_core::analysis::v_factor,
            z_factor: tddnet_core::analysis::z_factor,
        }
    }

    pub fn with(mutation: Option<Mutation>) -> Self {
        let mut k = Self::reference();
        if let Some(Mutation::VFactor) = mutation {
            k.v_factor = corrupted_v;
        }
        k
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub rule: String,
    pub pass: bool,
}

impl Check {
    fn close(name: impl Into<String>, measured: f64, expected: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            expected,
            rule: format!("|diff| < {tol:e}"),
            pass: (measured - expected).abs() < tol,
        }
    }

    fn relative(name: impl Into<String>, measured: f64, expected: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            expected,
            rule: format!("rel diff < {tol}"),
            pass: ((measured - expected) / expected).abs() < tol,
        }
    }

    fn holds(
        name: impl Into<String>,
        measured: f64,
        expected: f64,
        rule: &str,
        pass: bool,
    ) -> Self {
        Self {
            name: name.into(),
            measured,
            expected,
            rule: rule.into(),
            pass,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: measured {:.10} expected {:.10} ({})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.expected,
            self.rule
        )
    }
}

fn failed(name: &str, e: impl fmt::Display) -> Check {
    Check {
        name: format!("{name}: {e}"),
        measured: f64::NAN,
        expected: f64::NAN,
        rule: "evaluation error".into(),
        pass: false,
    }
}

fn interference_checks(k: &Kernels, out: &mut Vec<Check>) {
    for theta in [0.5f64, 1.0, 2.0] {
        for alpha in [3.0, 3.8, 4.0] {
            let name = format!("V({theta}, {alpha}) vs quadrature");
            let q = quadrature(
                |u: f64| 1.0 / (1.0 + u.powf(alpha / 2.0)),
                0.0,
                f64::INFINITY,
                1e-11,
            )
            .map(|i| theta.powf(2.0 / alpha) * i);
            match ((k.v_factor)(theta, alpha), q, (k.z_factor)(theta, alpha)) {
                (Ok(v), Ok(q), Ok(z)) => {
                    out.push(Check::close(name, v, q, 1e-8));
                    out.push(Check::holds(
                        format!("Z < V at ({theta}, {alpha})"),
                        z,
                        v,
                        "Z < V",
                        z < v,
                    ));
                }
                (v, q, z) => out.push(failed(&name, format!("{v:?} {q:?} {z:?}"))),
            }
        }
    }
    match (k.z_factor)(1.0, 4.0) {
        Ok(z) => out.push(Check::close("Z(1, 4) = pi/4", z, PI / 4.0, 1e-10)),
        Err(e) => out.push(failed("Z(1, 4)", e)),
    }
    match (k.v_factor)(1.0, 4.0) {
        Ok(v) => out.push(Check::close("V(1, 4) = pi/2", v, PI / 2.0, 1e-12)),
        Err(e) => out.push(failed("V(1, 4)", e)),
    }
}

fn queue_checks(out: &mut Vec<Check>) {
    let mut worst = 0.0f64;
    let mut error = None;
    for i in 0..10 {
        let xi = 0.005 + 0.09 * i as f64;
        for j in 0..10 {
            let s = xi + (1.0 - xi) * (j as f64 + 0.5) / 10.5;
            match (geo_g1_chain_adaptive(xi, s), geo_g1_idle_prob(xi, s, 1)) {
                (Ok(c), Ok(idle)) => {
                    worst = worst
                        .max((geo_g1_throughput(xi, s, 1) - c.throughput).abs())
                        .max((idle - c.idle_prob()).abs());
                }
                (c, i) => error = Some(format!("{:?} {:?}", c.err(), i.err())),
            }
        }
    }
    match error {
        Some(e) => out.push(failed("queue formulas vs chain", e)),
        None => out.push(Check::close(
            "queue formulas vs chain (max error, 10x10 grid)",
            worst,
            0.0,
            1e-6,
        )),
    }
    match geo_g1_chain(0.1, 0.25, 4096) {
        Ok(c) => out.push(Check::close(
            "chain idle probability at (0.1, 0.25)",
            c.idle_prob(),
            0.6,
            1e-12,
        )),
        Err(e) => out.push(failed("chain idle probability", e)),
    }
}

fn pmf_checks(out: &mut Vec<Check>) {
    let mut worst = 0.0f64;
    for rho in [0.01, 0.1, 1.0, 10.0] {
        for cap in [1, 3, 10] {
            match cell_load_pmf(rho, cap) {
                Ok(p) => worst = worst.max((p.probs.iter().sum::<f64>() - 1.0).abs()),
                Err(e) => out.push(failed("cell-load PMF", e)),
            }
        }
    }
    out.push(Check::close(
        "cell-load PMF normalization (max error)",
        worst,
        0.0,
        1e-9,
    ));
    if let Ok(p) = cell_load_pmf(0.1, 3) {
        for (i, want) in [0.008_872_99, 0.023_004_05, 0.038_340_08, 0.929_782_89]
            .into_iter()
            .enumerate()
        {
            out.push(Check::close(
                format!("cell-load PMF at rho=0.1, i={i}"),
                p.get(i),
                want,
                1e-7,
            ));
        }
    }
}

fn throughput_checks(out: &mut Vec<Check>) {
    let net = NetworkConfig::standard();
    let Ok(pmf) = cell_load_pmf(net.density_ratio(), net.ue_cap) else {
        out.push(failed(
            "cell-load PMF at standard parameters",
            "unavailable",
        ));
        return;
    };
    let mut worst = 0.0f64;
    for (u, d, p) in [
        (0.02, 0.02, 0.5),
        (0.02, 0.06, 0.75),
        (0.05, 0.01, 0.3),
        (0.1, 0.1, 0.5),
    ] {
        let t = TrafficConfig::new(u, d);
        match (
            stdd_throughput(&net, &t, p, &pmf),
            stdd_throughput_explicit(&net, &t, p, &pmf),
        ) {
            (Ok(a), Ok((dl, ul))) => {
                worst = worst
                    .max((a.dl_throughput - dl).abs())
                    .max((a.ul_throughput - ul).abs())
            }
            (a, b) => out.push(failed(
                "static TDD forms",
                format!("{:?} {:?}", a.err(), b.err()),
            )),
        }
    }
    out.push(Check::close(
        "static TDD explicit vs compositional form",
        worst,
        0.0,
        1e-12,
    ));
    for (u, d) in [(0.02, 0.02), (0.02, 0.08), (0.05, 0.01)] {
        if let Ok(p) = optimal_dl_fraction(&TrafficConfig::new(u, d)) {
            out.push(Check::close(
                format!("DL fraction vs grid search at ({u}, {d})"),
                p,
                dl_fraction_grid_search(u, d),
                1e-3,
            ));
        }
    }
    match full_buffer_dl_coverage(1.0, 4.0) {
        Ok(c) => out.push(Check::close(
            "full-buffer coverage at (1, 4)",
            c,
            1.0 / (1.0 + PI / 4.0),
            1e-10,
        )),
        Err(e) => out.push(failed("full-buffer coverage", e)),
    }
}

pub fn fast_checks(k: &Kernels) -> Vec<Check> {
    let mut out = Vec::new();
    out.push(
        match quadrature(|u: f64| 1.0 / (1.0 + u * u), 0.0, f64::INFINITY, 1e-12) {
            Ok(v) => Check::close("quadrature of 1/(1+u^2) over [0, inf)", v, PI / 2.0, 1e-10),
            Err(e) => failed("quadrature", e),
        },
    );
    interference_checks(k, &mut out);
    queue_checks(&mut out);
    pmf_checks(&mut out);
    throughput_checks(&mut out);
    out
}

fn sweep_ratio(dynamic: bool, ratio: f64) -> Option<(f64, f64)> {
    let t = TrafficConfig::new(0.02, 0.02 * ratio);
    let p = optimal_dl_fraction(&t).ok()?;
    let policy = if dynamic {
        TddPolicy::Dynamic { dl_fraction: p }
    } else {
        TddPolicy::Static { dl_fraction: p }
    };
    let r = analyze(&Scenario {
        network: NetworkConfig::standard(),
        traffic: t,
        policy,
    })
    .ok()?;
    Some((r.dl_throughput, r.ul_throughput))
}

fn shape_checks(out: &mut Vec<Check>) {
    let grid: Vec<f64> = (0..20)
        .map(|i| 0.1 * 100f64.powf(i as f64 / 19.0))
        .collect();
    for (name, dynamic) in [("STDD", false), ("DTDD", true)] {
        let Some(points) = grid
            .iter()
            .map(|&r| sweep_ratio(dynamic, r))
            .collect::<Option<Vec<_>>>()
        else {
            out.push(failed(name, "ratio sweep failed"));
            continue;
        };
        let dl: Vec<f64> = points.iter().map(|p| p.0).collect();
        let peak = dl
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map_or(0, |(i, _)| i);
        let unimodal = peak > 0
            && peak + 1 < dl.len()
            && dl[..=peak].windows(2).all(|w| w[1] >= w[0])
            && dl[peak..].windows(2).all(|w| w[1] <= w[0]);
        out.push(Check::holds(
            format!("{name} DL has one interior maximum over DL/UL ratio"),
            grid[peak],
            f64::NAN,
            "peak strictly inside [0.1, 10]",
            unimodal,
        ));
        let ul_ok = points.windows(2).all(|w| w[1].1 <= w[0].1);
        out.push(Check::holds(
            format!("{name} UL non-increasing over DL/UL ratio"),
            points[points.len() - 1].1,
            points[0].1,
            "last <= first, monotone",
            ul_ok,
        ));
    }
    for rho in [0.05, 0.1, 0.2] {
        let gap = |t: TrafficConfig| -> Option<(f64, f64)> {
            let mut net = NetworkConfig::standard();
            net.sap_density = rho * net.ue_density;
            let p = optimal_dl_fraction(&t).ok()?;
            let run = |policy| {
                analyze(&Scenario {
                    network: net,
                    traffic: t,
                    policy,
                })
                .ok()
            };
            let s = run(TddPolicy::Static { dl_fraction: p })?;
            let d = run(TddPolicy::Dynamic { dl_fraction: p })?;
            Some((
                ((d.dl_throughput - s.dl_throughput) / s.dl_throughput).abs(),
                ((d.ul_throughput - s.ul_throughput) / s.ul_throughput).abs(),
            ))
        };
        match (
            gap(TrafficConfig::new(0.005, 0.01)),
            gap(TrafficConfig::new(0.05, 0.1)),
        ) {
            (Some((ldl, lul)), Some((mdl, _))) => {
                out.push(Check::holds(
                    format!("light-traffic DTDD/STDD gap at rho={rho}"),
                    ldl.max(lul),
                    0.05,
                    "< 5% per direction",
                    ldl < 0.05 && lul < 0.05,
                ));
                out.push(Check::holds(
                    format!("medium-traffic DL gap exceeds light at rho={rho}"),
                    mdl,
                    ldl,
                    "medium > light",
                    mdl > ldl,
                ));
            }
            _ => out.push(failed(
                &format!("density point rho={rho}"),
                "analysis failed",
            )),
        }
    }
}

fn simulation_checks(out: &mut Vec<Check>) {
    let net = NetworkConfig::standard();
    let coverage = (0..48u64)
        .into_par_iter()
        .filter_map(|seed| {
            let dep = generate_deployment(&net, 2000.0, 1000 + seed).ok()?;
            Some(simulated_coverage(&dep, &net, 1, 1000 + seed, 0.5))
        })
        .reduce(CoverageCount::default, CoverageCount::merge);
    match (
        coverage.probability(),
        full_buffer_dl_coverage(net.sir_threshold, net.path_loss_exp),
    ) {
        (Some(got), Ok(want)) => out.push(Check::relative(
            "simulated full-buffer coverage",
            got,
            want,
            0.01,
        )),
        _ => out.push(failed("simulated full-buffer coverage", "no samples")),
    }

    let counts = (0..20_000u64)
        .into_par_iter()
        .map(|seed| {
            let mut h = vec![0u64; net.ue_cap + 1];
            if let Ok(dep) = generate_deployment(&net, 500.0, seed) {
                let a = associate(&dep, net.ue_cap, seed);
                for (s, p) in dep.sap_positions.iter().enumerate() {
                    if p.norm() <= 250.0 {
                        h[a.served_count(s)] += 1;
                    }
                }
            }
            h
        })
        .reduce(
            || vec![0u64; net.ue_cap + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let total: u64 = counts.iter().sum();
    if let Ok(pmf) = cell_load_pmf(net.density_ratio(), net.ue_cap) {
        for (i, &c) in counts.iter().enumerate() {
            if pmf.get(i) > 0.01 {
                out.push(Check::relative(
                    format!("served-UE histogram bin {i}"),
                    c as f64 / total as f64,
                    pmf.get(i),
                    0.05,
                ));
            }
        }
    }

    let t = TrafficConfig::new(0.02, 0.02);
    let sc = Scenario {
        network: net,
        traffic: t,
        policy: TddPolicy::Static { dl_fraction: 0.5 },
    };
    let sim = SimulationSection {
        region_radius_m: 500.0,
        slots: 50_000,
        warmup: 5_000,
        replications: 8,
        base_seed: 101,
    };
    let got = run_replications(&sc, &sim, 0.5);
    let want = cell_load_pmf(net.density_ratio(), net.ue_cap)
        .and_then(|pmf| stdd_throughput(&net, &t, 0.5, &pmf));
    match (got, want) {
        (Ok(g), Ok(w)) => {
            out.push(Check::relative(
                "simulated vs analytic STDD DL",
                g.aggregate.dl_throughput,
                w.dl_throughput,
                0.15,
            ));
            out.push(Check::relative(
                "simulated vs analytic STDD UL",
                g.aggregate.ul_throughput,
                w.ul_throughput,
                0.15,
            ));
        }
        (g, w) => out.push(failed(
            "STDD agreement",
            format!("{:?} {:?}", g.err(), w.err()),
        )),
    }
}

pub fn full_checks(k: &Kernels) -> Vec<Check> {
    let mut out = fast_checks(k);
    shape_checks(&mut out);
    simulation_checks(&mut out);
    out
}

pub fn run(level: Level, mutation: Option<Mutation>) -> Result<(), CliError> {
    let kernels = Kernels::with(mutation);
    let checks = match level {
        Level::Fast => fast_checks(&kernels),
        Level::Full => full_checks(&kernels),
    };
    for c in &checks {
        println!("{c}");
    }
    let failures = checks.iter().filter(|c| !c.pass).count();
    println!("{} checks, {failures} failed", checks.len());
    if failures > 0 {
        Err(CliError::Validation(failures))
    } else {
        Ok(())
    }
}
