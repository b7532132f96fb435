use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::series::TimeSeries;
use crate::cld::PronyFit;
use crate::error::{Error, Result};
use crate::ode::{OdeSystem, Rk4};
use crate::stiffness::ComplexStiffness;

/// Prescribed peak angle of the bender, ±9°.
pub const DEFAULT_THETA_AMPLITUDE: f64 = 9.0 * PI / 180.0;
pub const DEFAULT_SAMPLE_RATE: f64 = 200.0;

#[derive(Clone, Debug, PartialEq)]
pub enum BenderPlant {
    /// Linear plant fully described by its response at the drive frequency.
    Stiffness(ComplexStiffness),
    /// Time-domain Maxwell-branch hinge, integrated from rest.
    Prony(PronyFit),
}

impl From<ComplexStiffness> for BenderPlant {
    fn from(k: ComplexStiffness) -> Self {
        Self::Stiffness(k)
    }
}

impl From<PronyFit> for BenderPlant {
    fn from(fit: PronyFit) -> Self {
        Self::Prony(fit)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenderSettings {
    /// Hz
    pub drive_freq: f64,
    /// rad
    pub theta_amp: f64,
    /// Hz
    pub sample_rate: f64,
    pub n_cycles: usize,
    /// Cycles integrated and dropped before recording (Prony plants only).
    pub warmup_cycles: usize,
    /// Signal-to-noise ratio of the torque fundamental, dB. `None` is noiseless.
    pub noise_snr_db: Option<f64>,
    pub seed: u64,
}

impl BenderSettings {
    pub fn new(drive_freq: f64) -> Self {
        Self {
            drive_freq,
            theta_amp: DEFAULT_THETA_AMPLITUDE,
            sample_rate: DEFAULT_SAMPLE_RATE,
            n_cycles: 10,
            warmup_cycles: 5,
            noise_snr_db: None,
            seed: 0,
        }
    }
}

struct Branches<'a> {
    fit: &'a PronyFit,
    amp: f64,
    omega: f64,
}

impl OdeSystem for Branches<'_> {
    fn dim(&self) -> usize {
        self.fit.n_states()
    }
    fn rates(&self, t: f64, y: &[f64], dydt: &mut [f64]) {
        let theta = self.amp * (self.omega * t).sin();
        self.fit.state_rates(theta, y, dydt);
    }
}

/// Synthetic bender record: prescribed `θ = A sin(2πft)` and the plant's torque.
///
/// The record holds `n_cycles` whole periods plus the closing sample.
pub fn synth_bender_pair(
    plant: &BenderPlant,
    settings: &BenderSettings,
) -> Result<(TimeSeries, TimeSeries)> {
    let BenderSettings {
        drive_freq: f,
        theta_amp,
        sample_rate: fs,
        n_cycles,
        warmup_cycles,
        noise_snr_db,
        seed,
    } = *settings;
    if !(theta_amp > 0.0 && theta_amp.is_finite()) {
        return Err(Error::Domain(format!("theta amplitude must be > 0, got {theta_amp}")));
    }
    if !(fs > 0.0 && fs.is_finite()) {
        return Err(Error::Domain(format!("sample rate must be > 0, got {fs}")));
    }
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::Domain(format!("drive frequency must be > 0, got {f}")));
    }
    if f >= 0.5 * fs {
        return Err(Error::Domain(format!(
            "drive frequency {f} Hz violates Nyquist at {fs} Hz sampling"
        )));
    }
    if n_cycles == 0 {
        return Err(Error::Domain("need at least one cycle".into()));
    }
    let omega = 2.0 * PI * f;
    let n = (super::series::position(fs, n_cycles as f64 / f)).ceil() as usize + 1;
    let time = |i: usize| i as f64 / fs;
    let theta: Vec<f64> = (0..n).map(|i| theta_amp * (omega * time(i)).sin()).collect();

    let (mut torque, fundamental) = match plant {
        BenderPlant::Stiffness(k) => {
            let tq = (0..n)
                .map(|i| {
                    let ph = omega * time(i);
                    theta_amp * (k.storage * ph.sin() + k.loss * ph.cos())
                })
                .collect();
            (tq, theta_amp * k.magnitude())
        }
        BenderPlant::Prony(fit) => {
            fit.validate()?;
            let sys = Branches {
                fit,
                amp: theta_amp,
                omega,
            };
            let sample_dt = 1.0 / fs;
            let max_dt = fit.min_tau().map_or(sample_dt, |tau| tau / 20.0);
            let sub = ((sample_dt / max_dt).ceil() as usize).max(4);
            let dt = sample_dt / sub as f64;
            let mut rk = Rk4::new(sys.dim());
            let mut z = vec![0.0; sys.dim()];

            let warm_steps = (super::series::position(fs, warmup_cycles as f64 / f)).ceil() as usize;
            let t0 = -(warm_steps as f64) / fs;
            for s in 0..warm_steps * sub {
                rk.step(&sys, t0 + s as f64 * dt, &mut z, dt);
            }
            let mut tq = Vec::with_capacity(n);
            for i in 0..n {
                tq.push(fit.moment(theta[i], &z));
                if i + 1 < n {
                    for s in 0..sub {
                        rk.step(&sys, time(i) + s as f64 * dt, &mut z, dt);
                    }
                }
            }
            (tq, theta_amp * fit.response(omega).norm())
        }
    };

    if let Some(snr_db) = noise_snr_db {
        if !snr_db.is_finite() {
            return Err(Error::Domain(format!("SNR must be finite, got {snr_db}")));
        }
        let sigma = fundamental / 2f64.sqrt() / 10f64.powf(snr_db / 20.0);
        let normal = Normal::new(0.0, sigma)
            .map_err(|e| Error::Domain(format!("noise distribution: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in torque.iter_mut() {
            *v += normal.sample(&mut rng);
        }
    }

    Ok((
        TimeSeries::new(fs, theta, 0.0)?,
        TimeSeries::new(fs, torque, 0.0)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cld::PronyBranch;
    use crate::signal::lockin_extract;

    #[test]
    fn spring_plant_is_in_phase() {
        let plant = BenderPlant::Stiffness(ComplexStiffness::new(1.2, 0.0));
        let (th, tq) = synth_bender_pair(&plant, &BenderSettings::new(1.0)).unwrap();
        for (a, b) in th.samples().iter().zip(tq.samples()) {
            assert!((b - 1.2 * a).abs() < 1e-15);
        }
        assert_eq!(th.whole_cycles(1.0), 10);
    }

    #[test]
    fn spring_damper_round_trip() {
        let k = ComplexStiffness::new(2.0, 0.05 * 2.0 * PI * 3.0);
        let (th, tq) = synth_bender_pair(&k.into(), &BenderSettings::new(3.0)).unwrap();
        let r = lockin_extract(&th, &tq, 3.0).unwrap();
        assert!((r.stiffness.storage - k.storage).abs() < 1e-9 * k.storage);
        assert!((r.stiffness.loss - k.loss).abs() < 1e-9 * k.loss);
    }

    #[test]
    fn prony_plant_matches_frequency_response() {
        let fit = PronyFit::new(
            0.8,
            vec![
                PronyBranch { stiffness: 0.3, tau: 0.02 },
                PronyBranch { stiffness: 0.5, tau: 0.09 },
            ],
        )
        .unwrap();
        let f = 2.0;
        let expected = fit.response(2.0 * PI * f);
        let (th, tq) = synth_bender_pair(&fit.into(), &BenderSettings::new(f)).unwrap();
        let r = lockin_extract(&th, &tq, f).unwrap();
        let got = r.stiffness.to_complex();
        assert!((got - expected).norm() / expected.norm() < 1e-4, "{got} vs {expected}");
    }

    #[test]
    fn noise_is_reproducible() {
        let k = ComplexStiffness::new(2.0, 0.9);
        let mut s = BenderSettings::new(3.0);
        s.noise_snr_db = Some(20.0);
        s.seed = 11;
        let a = synth_bender_pair(&k.into(), &s).unwrap().1;
        let b = synth_bender_pair(&k.into(), &s).unwrap().1;
        assert_eq!(a, b);
        s.seed = 12;
        let c = synth_bender_pair(&k.into(), &s).unwrap().1;
        assert_ne!(a, c);
    }

    #[test]
    fn nyquist_violation() {
        let k = ComplexStiffness::new(1.0, 0.0);
        let mut s = BenderSettings::new(100.0);
        assert!(synth_bender_pair(&k.into(), &s).is_err());
        s.drive_freq = 1.0;
        s.theta_amp = 0.0;
        assert!(synth_bender_pair(&k.into(), &s).is_err());
    }
}
