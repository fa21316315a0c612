use proptest::prelude::*;
use tddnet_core::analysis::{
    cell_load_pmf, dtdd_fixed_point, dtdd_service_rates, dtdd_throughput, stdd_throughput,
    stdd_throughput_explicit, v_factor, z_factor, CouplingSystem,
};
use tddnet_core::oracles::quadrature;
use tddnet_core::{NetworkConfig, TrafficConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn z_below_v_and_both_increasing(theta in 0.01f64..20.0, alpha in 2.2f64..6.0, bump in 1.01f64..3.0) {
        let (v, z) = (v_factor(theta, alpha).unwrap(), z_factor(theta, alpha).unwrap());
        prop_assert!(0.0 < z && z < v);
        prop_assert!(v_factor(theta * bump, alpha).unwrap() > v);
        prop_assert!(z_factor(theta * bump, alpha).unwrap() > z);
    }

    #[test]
    fn v_matches_quadrature(theta in 0.1f64..10.0, alpha in 2.5f64..6.0) {
        let q = theta.powf(2.0 / alpha)
            * quadrature(|u: f64| 1.0 / (1.0 + u.powf(alpha / 2.0)), 0.0, f64::INFINITY, 1e-11).unwrap();
        prop_assert!((v_factor(theta, alpha).unwrap() - q).abs() < 1e-8);
    }

    #[test]
    fn stdd_forms_agree(xu in 0.001f64..0.3, xd in 0.001f64..0.3, p in 0.05f64..0.95, rho in 0.02f64..2.0) {
        let mut net = NetworkConfig::standard();
        net.sap_density = rho * net.ue_density;
        let t = TrafficConfig::new(xu, xd);
        let pmf = cell_load_pmf(rho, net.ue_cap).unwrap();
        let r = stdd_throughput(&net, &t, p, &pmf).unwrap();
        let (dl, ul) = stdd_throughput_explicit(&net, &t, p, &pmf).unwrap();
        prop_assert!((r.dl_throughput - dl).abs() < 1e-12);
        prop_assert!((r.ul_throughput - ul).abs() < 1e-12);
    }

    #[test]
    fn stdd_monotone_in_dl_fraction(xu in 0.001f64..0.2, xd in 0.001f64..0.2, p in 0.05f64..0.9, dp in 0.001f64..0.09) {
        let net = NetworkConfig::standard();
        let t = TrafficConfig::new(xu, xd);
        let pmf = cell_load_pmf(net.density_ratio(), net.ue_cap).unwrap();
        let a = stdd_throughput(&net, &t, p, &pmf).unwrap();
        let b = stdd_throughput(&net, &t, p + dp, &pmf).unwrap();
        prop_assert!(b.dl_throughput >= a.dl_throughput - 1e-15);
        prop_assert!(b.ul_throughput <= a.ul_throughput + 1e-15);
    }

    #[test]
    fn scale_invariance(xu in 0.001f64..0.1, xd in 0.001f64..0.1, s in 0.01f64..100.0, q in 0.01f64..100.0) {
        let base = NetworkConfig::standard();
        let mut scaled = base;
        scaled.sap_density *= s;
        scaled.ue_density *= s;
        scaled.sap_power *= q;
        scaled.ue_power *= q;
        let t = TrafficConfig::new(xu, xd);
        let pmf = |n: &NetworkConfig| cell_load_pmf(n.density_ratio(), n.ue_cap).unwrap();
        let (a, b) = (pmf(&base), pmf(&scaled));
        let sa = stdd_throughput(&base, &t, 0.5, &a).unwrap();
        let sb = stdd_throughput(&scaled, &t, 0.5, &b).unwrap();
        prop_assert!((sa.dl_throughput - sb.dl_throughput).abs() < 1e-12);
        prop_assert!((sa.ul_throughput - sb.ul_throughput).abs() < 1e-12);
        if let (Ok(da), Ok(db)) = (dtdd_throughput(&base, &t, &a), dtdd_throughput(&scaled, &t, &b)) {
            prop_assert!((da.dl_throughput - db.dl_throughput).abs() < 1e-9);
            prop_assert!((da.ul_throughput - db.ul_throughput).abs() < 1e-9);
        }
    }

    #[test]
    fn symmetric_fixed_point_differs_from_closed_form_at_second_order(xi in 0.0005f64..0.05) {
        // The closed forms drop a term quadratic in the arrival rate.
        let mut net = NetworkConfig::standard();
        net.ue_power = net.sap_power;
        let t = TrafficConfig::new(xi, xi);
        let pmf = cell_load_pmf(net.density_ratio(), net.ue_cap).unwrap();
        let fp = dtdd_fixed_point(&net, &t, &pmf, 1e-13, 1000, CouplingSystem::SymmetryCorrected).unwrap();
        let closed = dtdd_service_rates(&net, &t, &pmf).unwrap();
        for (a, b) in [(fp.rates.dl, closed.dl), (fp.rates.ul, closed.ul)] {
            prop_assert!(a <= b + 1e-12);
            prop_assert!(b - a < 4.0 * xi * xi);
        }
    }
}
