use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::series::TimeSeries;
use crate::error::{Error, Result};
use crate::stiffness::ComplexStiffness;

/// Angle amplitudes below this are treated as no excitation at all.
pub const THETA_NOISE_FLOOR: f64 = 1e-6;
pub const MIN_LOCKIN_CYCLES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LockinResult {
    pub stiffness: ComplexStiffness,
    /// rad
    pub theta_amplitude: f64,
    /// N·m
    pub torque_amplitude: f64,
    /// Torque phase lag behind angle, rad.
    pub phase_lag: f64,
    /// Share of torque AC power at the drive frequency.
    pub coherence: f64,
}

/// Least-squares fit of `a + b cos(ωt) + c sin(ωt)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Harmonic {
    pub cos: f64,
    pub sin: f64,
    /// Mean squared deviation from the offset, i.e. total AC power.
    pub ac_power: f64,
}

impl Harmonic {
    /// Complex amplitude with `x(t) = Re{x̂ e^{iωt}}`, i.e. `x̂ = b − ic`.
    pub fn phasor(&self) -> Complex64 {
        Complex64::new(self.cos, -self.sin)
    }

    pub fn amplitude(&self) -> f64 {
        self.cos.hypot(self.sin)
    }
}

pub(crate) fn fit_harmonic(x: &[f64], fs: f64, omega: f64) -> Harmonic {
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    for (i, &v) in x.iter().enumerate() {
        let ph = omega * i as f64 / fs;
        let row = Vector3::new(1.0, ph.cos(), ph.sin());
        ata += row * row.transpose();
        atb += row * v;
    }
    let coef = ata
        .cholesky()
        .map(|c| c.solve(&atb))
        .unwrap_or_else(|| ata.lu().solve(&atb).unwrap_or_else(Vector3::zeros));
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let ac_power = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Harmonic {
        cos: coef[1],
        sin: coef[2],
        ac_power,
    }
}

/// Number of samples spanning exactly `cycles` drive periods, half-open.
pub(crate) fn whole_cycle_len(fs: f64, freq: f64, cycles: usize) -> usize {
    let p = super::series::position(fs, cycles as f64 / freq);
    p.ceil() as usize
}

pub(crate) fn check_pair(theta: &TimeSeries, torque: &TimeSeries, drive_freq: f64) -> Result<usize> {
    if theta.len() != torque.len() {
        return Err(Error::Arity(format!(
            "angle and torque records differ in length ({} vs {})",
            theta.len(),
            torque.len()
        )));
    }
    let (fa, fb) = (theta.sample_rate(), torque.sample_rate());
    if (fa - fb).abs() > 1e-9 * fa.max(fb) {
        return Err(Error::Arity(format!(
            "angle and torque sample rates differ ({fa} vs {fb} Hz)"
        )));
    }
    if !(drive_freq > 0.0 && drive_freq.is_finite()) {
        return Err(Error::Domain(format!(
            "drive frequency must be > 0, got {drive_freq}"
        )));
    }
    if drive_freq >= 0.5 * fa {
        return Err(Error::Domain(format!(
            "drive frequency {drive_freq} Hz is at or above Nyquist ({} Hz)",
            0.5 * fa
        )));
    }
    let cycles = theta.whole_cycles(drive_freq);
    if cycles < MIN_LOCKIN_CYCLES {
        return Err(Error::InsufficientRecord {
            needed: MIN_LOCKIN_CYCLES,
            available: theta.span() * drive_freq,
        });
    }
    Ok(cycles)
}

/// Single-frequency lock-in estimate of `K* = T̂/θ̂` over the whole cycles of the record.
pub fn lockin_extract(
    theta: &TimeSeries,
    torque: &TimeSeries,
    drive_freq: f64,
) -> Result<LockinResult> {
    let cycles = check_pair(theta, torque, drive_freq)?;
    let fs = theta.sample_rate();
    let n = whole_cycle_len(fs, drive_freq, cycles).min(theta.len());
    let omega = 2.0 * PI * drive_freq;

    let th = fit_harmonic(&theta.samples()[..n], fs, omega);
    let tq = fit_harmonic(&torque.samples()[..n], fs, omega);
    let theta_amplitude = th.amplitude();
    if theta_amplitude < THETA_NOISE_FLOOR {
        return Err(Error::DegenerateExcitation {
            amplitude: theta_amplitude,
        });
    }
    let k = tq.phasor() / th.phasor();
    let stiffness = ComplexStiffness::from_complex(k);
    let torque_amplitude = tq.amplitude();
    let coherence = if tq.ac_power > 0.0 {
        (0.5 * torque_amplitude * torque_amplitude / tq.ac_power).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(LockinResult {
        stiffness,
        theta_amplitude,
        torque_amplitude,
        phase_lag: stiffness.phase(),
        coherence,
    })
}
