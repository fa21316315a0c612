use tddnet_core::analysis::{
    activity_probability, cell_load_pmf, dtdd_fixed_point, mean_load, stdd_throughput,
    CouplingSystem,
};
use tddnet_core::simulator::{
    associate, generate_deployment, run_replications, simulate_once, SimSettings, TierBusy,
};
use tddnet_core::{NetworkConfig, Scenario, SimulationSection, TddPolicy, TrafficConfig};

fn standard_scenario(traffic: TrafficConfig, policy: TddPolicy) -> Scenario {
    Scenario {
        network: NetworkConfig::standard(),
        traffic,
        policy,
    }
}

#[test]
fn truncated_mean_load_matches_served_count() {
    let net = NetworkConfig::standard();
    let (mut saps, mut served) = (0usize, 0usize);
    for seed in 0..2000 {
        let dep = generate_deployment(&net, 500.0, seed).unwrap();
        let a = associate(&dep, net.ue_cap, seed);
        for (s, p) in dep.sap_positions.iter().enumerate() {
            if p.norm() <= 250.0 {
                saps += 1;
                served += a.served_count(s);
            }
        }
    }
    let empirical = served as f64 / saps as f64;
    let pmf = cell_load_pmf(net.density_ratio(), net.ue_cap).unwrap();
    let analytic = mean_load(&pmf);
    assert!(
        (empirical - analytic).abs() / analytic < 0.01,
        "{empirical} vs {analytic}"
    );
}

#[test]
fn static_tdd_symmetric_point_matches_closed_form() {
    let t = TrafficConfig::new(0.02, 0.02);
    let sc = standard_scenario(t, TddPolicy::Static { dl_fraction: 0.5 });
    let sim = SimulationSection {
        region_radius_m: 500.0,
        slots: 50_000,
        warmup: 5_000,
        replications: 8,
        base_seed: 101,
    };
    let got = run_replications(&sc, &sim, 0.5).unwrap().aggregate;
    let net = sc.network;
    let pmf = cell_load_pmf(net.density_ratio(), net.ue_cap).unwrap();
    let want = stdd_throughput(&net, &t, 0.5, &pmf).unwrap();
    for (s, a) in [
        (got.dl_throughput, want.dl_throughput),
        (got.ul_throughput, want.ul_throughput),
    ] {
        assert!((s - a).abs() / a < 0.15, "simulated {s} vs analytic {a}");
    }
}

#[test]
fn two_ue_cell_busy_fraction_matches_activity_probability() {
    let t = TrafficConfig::new(0.02, 0.02);
    let p = 0.5;
    let sc = standard_scenario(t, TddPolicy::Static { dl_fraction: p });
    let mut busy = TierBusy::default();
    let (mut attempts, mut successes) = (0u64, 0u64);
    for seed in 0..24 {
        let m = simulate_once(&sc, 500.0, &SimSettings::new(40_000, 4_000, 500 + seed)).unwrap();
        busy.slots
            .resize(busy.slots.len().max(m.dl_busy.slots.len()), 0);
        busy.active.resize(busy.slots.len(), 0);
        for k in 0..m.dl_busy.slots.len() {
            busy.slots[k] += m.dl_busy.slots[k];
            busy.active[k] += m.dl_busy.active[k];
        }
        attempts += m.dl.attempts;
        successes += m.dl.successes;
    }
    let mu = successes as f64 / attempts as f64;
    let expected = activity_probability(2, t.dl_rate, p, mu).unwrap();
    let got = busy.fraction(2).unwrap();
    assert!(
        (got - expected).abs() / expected < 0.10,
        "busy {got} vs activity {expected} (mu {mu})"
    );
}

#[test]
fn corrected_coupling_tracks_simulated_ul_service_rate() {
    let t = TrafficConfig::new(0.02, 0.04);
    let sc = standard_scenario(
        t,
        TddPolicy::Dynamic {
            dl_fraction: 2.0 / 3.0,
        },
    );
    let sim = SimulationSection {
        region_radius_m: 500.0,
        slots: 50_000,
        warmup: 5_000,
        replications: 6,
        base_seed: 7,
    };
    let measured = run_replications(&sc, &sim, 0.5)
        .unwrap()
        .aggregate
        .diag("ul_service_rate")
        .unwrap();
    let net = sc.network;
    let pmf = cell_load_pmf(net.density_ratio(), net.ue_cap).unwrap();
    let solve = |system| {
        dtdd_fixed_point(&net, &t, &pmf, 1e-10, 10_000, system)
            .unwrap()
            .rates
            .ul
    };
    let corrected = solve(CouplingSystem::SymmetryCorrected);
    let literal = solve(CouplingSystem::Literal);
    assert!((corrected - measured).abs() < (literal - measured).abs());
    assert!(
        (corrected - measured).abs() / measured < 0.05,
        "{corrected} vs {measured}"
    );
}

#[test]
fn warmup_excludes_early_packets() {
    let sc = standard_scenario(
        TrafficConfig::new(0.05, 0.05),
        TddPolicy::Static { dl_fraction: 0.5 },
    );
    let full = simulate_once(&sc, 300.0, &SimSettings::new(4_000, 0, 9)).unwrap();
    let late = simulate_once(&sc, 300.0, &SimSettings::new(4_000, 2_000, 9)).unwrap();
    let arrivals = |m: &tddnet_core::simulator::SimMetrics| -> u64 {
        m.links.iter().map(|l| l.dl.arrivals + l.ul.arrivals).sum()
    };
    assert_eq!(full.total_arrivals, late.total_arrivals);
    assert!(arrivals(&late) < arrivals(&full));
    assert!(late.dl.attempts < full.dl.attempts);
}
