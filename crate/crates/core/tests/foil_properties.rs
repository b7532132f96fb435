use cldsim::cld::{PronyBranch, PronyFit};
use cldsim::foil::{
    propulsion_metrics, simulate_constrained, simulate_free_swim, FoilConfig, FreeSwimParams, FreeSwimTrace,
    KinematicsSpec,
};
use cldsim::harness::{run_strouhal_sweep, ProtocolConfig};
use proptest::prelude::*;

prop_compose! {
    fn hinges()(
        k_inf in 0.005f64..0.5,
        k1 in 0.0f64..0.5,
        tau1 in 2e-3f64..0.5,
    ) -> PronyFit {
        let branches = if k1 > 0.0 { vec![PronyBranch { stiffness: k1, tau: tau1 }] } else { vec![] };
        PronyFit::new(k_inf, branches).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn passive_hinge_and_bounded_efficiency(hinge in hinges(), freq in 0.5f64..2.0) {
        let kin = KinematicsSpec::at_frequency(freq);
        let tr = simulate_constrained(&FoilConfig::default(), &kin, &hinge, 4, 8).unwrap();
        let m = propulsion_metrics(&tr, &kin).unwrap();
        let scale = m.effective_stiffness.map_or(hinge.k_inf, |k| k.magnitude()) * m.pitch_amplitude.powi(2);
        prop_assert!(m.hinge_cycle_work <= 1e-9 * scale, "work {} scale {}", m.hinge_cycle_work, scale);
        if let Some(e) = m.efficiency {
            prop_assert!(e <= 1.0, "efficiency {e}");
        }
    }

    #[test]
    fn position_is_integrated_velocity(
        u in proptest::collection::vec(-1.0f64..1.0, 2..400),
        fs in 10.0f64..2000.0,
    ) {
        let tr = FreeSwimTrace::from_velocity(fs, 0.5, u.clone()).unwrap();
        let dt = 1.0 / fs;
        let mut x = 0.0;
        let scale: f64 = u.iter().map(|v| v.abs()).sum::<f64>() * dt + f64::MIN_POSITIVE;
        for i in 1..u.len() {
            x += 0.5 * dt * (u[i - 1] + u[i]);
            prop_assert!((tr.position[i] - tr.position[0] - x).abs() <= 1e-9 * scale);
        }
    }
}

#[test]
fn phase_lag_rises_with_strouhal_for_design_c() {
    let cfg = ProtocolConfig::from_toml_str(
        "[[designs]]\nname = \"c\"\ncoverage_pct = 66.7\n[freeswim]\ndesigns = [\"c\"]\n",
        &[],
    )
    .unwrap();
    let table = run_strouhal_sweep(&cfg).unwrap();
    let lags: Vec<f64> = table.rows.iter().map(|r| r.metrics.phase_lag.unwrap()).collect();
    assert_eq!(lags.len(), 7);
    assert!(lags.windows(2).all(|w| w[1] >= w[0]), "{lags:?}");
}

#[test]
fn repeated_runs_are_bit_identical() {
    let hinge = PronyFit::new(0.03, vec![PronyBranch { stiffness: 0.1, tau: 0.01 }]).unwrap();
    let kin = KinematicsSpec::at_frequency(2.0);
    let foil = FoilConfig::default();
    let a = simulate_constrained(&foil, &kin, &hinge, 3, 2).unwrap();
    let b = simulate_constrained(&foil, &kin, &hinge, 3, 2).unwrap();
    assert_eq!(a, b);
    let params = FreeSwimParams {
        duration: 1.0,
        ..FreeSwimParams::default()
    };
    let a = simulate_free_swim(&foil, &kin, &hinge, &params).unwrap();
    let b = simulate_free_swim(&foil, &kin, &hinge, &params).unwrap();
    assert_eq!(a, b);
}
