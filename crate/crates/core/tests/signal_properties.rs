use std::f64::consts::PI;

use cldsim::signal::{hysteresis_loop_area, lockin_extract, synth_bender_pair, BenderPlant, BenderSettings};
use cldsim::{impedance_fractions, ComplexStiffness};
use proptest::prelude::*;

fn settings(freq: f64, amp: f64) -> BenderSettings {
    BenderSettings {
        theta_amp: amp,
        ..BenderSettings::new(freq)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn loop_area_matches_lockin_loss(
        k in 0.01f64..10.0,
        eta in 0.0f64..2.0,
        freq in 0.5f64..5.0,
        amp in 0.01f64..0.5,
    ) {
        let plant = BenderPlant::Stiffness(ComplexStiffness::new(k, eta * k));
        let (th, tq) = synth_bender_pair(&plant, &settings(freq, amp)).unwrap();
        let lock = lockin_extract(&th, &tq, freq).unwrap();
        let area = hysteresis_loop_area(&th, &tq, freq).unwrap();
        let expected = PI * lock.stiffness.loss * amp * amp;
        // discretisation error scales with the stored, not the dissipated, energy
        prop_assert!((area - expected).abs() <= 0.005 * PI * k * (1.0 + eta) * amp * amp);
    }

    #[test]
    fn stiffness_is_amplitude_invariant(
        k in 0.01f64..10.0,
        c in 0.0f64..1.0,
        freq in 0.5f64..5.0,
        amp in 1e-3f64..0.2,
    ) {
        let plant = BenderPlant::Stiffness(ComplexStiffness::new(k, c * 2.0 * PI * freq));
        let (a_th, a_tq) = synth_bender_pair(&plant, &settings(freq, amp)).unwrap();
        let (b_th, b_tq) = synth_bender_pair(&plant, &settings(freq, 3.0 * amp)).unwrap();
        let a = lockin_extract(&a_th, &a_tq, freq).unwrap().stiffness;
        let b = lockin_extract(&b_th, &b_tq, freq).unwrap().stiffness;
        let scale = a.magnitude();
        prop_assert!((a.storage - b.storage).abs() <= 1e-9 * scale);
        prop_assert!((a.loss - b.loss).abs() <= 1e-9 * scale);
    }

    #[test]
    fn fractions_normalised(storage in 0.0f64..1e3, loss in 0.0f64..1e3) {
        prop_assume!(storage + loss > 0.0);
        let f = impedance_fractions(ComplexStiffness::new(storage, loss)).unwrap();
        prop_assert_eq!(f.elastic + f.dissipative, 1.0);
    }
}

#[test]
fn pure_damper_lags_quarter_cycle() {
    for freq in [0.5, 1.0, 3.0, 5.0] {
        let plant = BenderPlant::Stiffness(ComplexStiffness::new(0.0, 0.3));
        let (th, tq) = synth_bender_pair(&plant, &settings(freq, 0.1)).unwrap();
        let r = lockin_extract(&th, &tq, freq).unwrap();
        assert!((r.phase_lag - PI / 2.0).abs() < 1e-6, "{freq}: {}", r.phase_lag);
    }
}

#[test]
fn noisy_storage_median_error() {
    let k = ComplexStiffness::new(2.0, 0.05 * 2.0 * PI * 3.0);
    let mut errs: Vec<f64> = (0..100)
        .map(|seed| {
            let s = BenderSettings {
                noise_snr_db: Some(20.0),
                seed,
                ..BenderSettings::new(3.0)
            };
            let (th, tq) = synth_bender_pair(&BenderPlant::Stiffness(k), &s).unwrap();
            let r = lockin_extract(&th, &tq, 3.0).unwrap();
            (r.stiffness.storage - k.storage).abs() / k.storage
        })
        .collect();
    errs.sort_by(f64::total_cmp);
    assert!(errs[50] < 0.01, "{}", errs[50]);
}
