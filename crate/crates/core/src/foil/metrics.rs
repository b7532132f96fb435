use serde::{Deserialize, Serialize};

use super::config::KinematicsSpec;
use super::constrained::ConstrainedTrace;
use crate::error::{Error, Result};
use crate::signal::{cycle_average, hysteresis_loop_area, lockin_extract, TimeSeries, MIN_LOCKIN_CYCLES};
use crate::stiffness::{impedance_fractions, ComplexStiffness, ImpedanceFractions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleMetrics {
    /// N
    pub mean_thrust: f64,
    /// Mean of the positive part of actuator power, W.
    pub mean_input_power: f64,
    /// `T̄·U / P̄_in`; `None` unless both are positive.
    pub efficiency: Option<f64>,
    /// Hinge moment over pitch angle at the heave frequency.
    pub effective_stiffness: Option<ComplexStiffness>,
    pub fractions: Option<ImpedanceFractions>,
    /// rad
    pub phase_lag: Option<f64>,
    /// Work done by the hinge on the pitch motion per cycle, J.
    pub hinge_cycle_work: f64,
    /// rad
    pub pitch_amplitude: f64,
}

pub fn propulsion_metrics(trace: &ConstrainedTrace, kin: &KinematicsSpec) -> Result<CycleMetrics> {
    kin.validate()?;
    let f = kin.heave_freq;
    let series = |v: &[f64]| trace.series(v);
    let thrust = series(&trace.thrust)?;
    let cycles = thrust.whole_cycles(f);
    if cycles < MIN_LOCKIN_CYCLES {
        return Err(Error::InsufficientRecord {
            needed: MIN_LOCKIN_CYCLES,
            available: thrust.span() * f,
        });
    }
    let mean = |s: &TimeSeries| -> Result<f64> {
        let per_cycle = cycle_average(s, f)?;
        Ok(per_cycle.iter().sum::<f64>() / per_cycle.len() as f64)
    };
    let mean_thrust = mean(&thrust)?;
    let positive: Vec<f64> = trace.power.iter().map(|p| p.max(0.0)).collect();
    let mean_input_power = mean(&series(&positive)?)?;
    let efficiency = (mean_thrust > 0.0 && mean_input_power > 0.0)
        .then(|| mean_thrust * kin.freestream / mean_input_power);

    let pitch = series(&trace.pitch)?;
    let moment = series(&trace.hinge_moment)?;
    let hinge_cycle_work = -hysteresis_loop_area(&pitch, &moment, f)?;
    let lockin = match lockin_extract(&pitch, &moment, f) {
        Ok(r) => Some(r),
        Err(Error::DegenerateExcitation { .. }) => None,
        Err(e) => return Err(e),
    };
    // an elastic hinge leaves round-off loss of either sign
    let effective_stiffness = lockin.map(|r| {
        let mut k = r.stiffness;
        if k.loss < 0.0 && k.loss.abs() <= 1e-9 * k.storage.abs() {
            k.loss = 0.0;
        }
        k
    });
    Ok(CycleMetrics {
        mean_thrust,
        mean_input_power,
        efficiency,
        effective_stiffness,
        fractions: effective_stiffness.and_then(|k| impedance_fractions(k).ok()),
        phase_lag: lockin.map(|r| r.phase_lag),
        hinge_cycle_work,
        pitch_amplitude: lockin.map_or(0.0, |r| r.theta_amplitude),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foil::dynamics::StepPlan;

    fn synthetic(thrust: f64, power: f64) -> ConstrainedTrace {
        let n = 3001;
        let fs = 1000.0;
        let w = 2.0 * std::f64::consts::PI;
        let time: Vec<f64> = (0..n).map(|i| i as f64 / fs).collect();
        let pitch: Vec<f64> = time.iter().map(|t| 0.1 * (w * t).sin()).collect();
        let hinge_moment = time
            .iter()
            .map(|t| 0.2 * (w * t).sin() + 0.05 * (w * t).cos())
            .collect();
        ConstrainedTrace {
            sample_rate: fs,
            heave: vec![0.0; n],
            heave_velocity: vec![0.0; n],
            pitch_rate: vec![0.0; n],
            thrust: vec![thrust; n],
            lateral: vec![0.0; n],
            power: vec![power; n],
            angle_of_attack: vec![0.0; n],
            pitch,
            hinge_moment,
            time,
            plan: StepPlan {
                dt: 1e-3,
                steps_per_cycle: 1000,
                stride: 1,
            },
        }
    }

    #[test]
    fn constant_loads_efficiency() {
        let kin = KinematicsSpec::at_frequency(1.0);
        let m = propulsion_metrics(&synthetic(0.5, 1.0), &kin).unwrap();
        assert!((m.mean_thrust - 0.5).abs() < 1e-12);
        assert!((m.efficiency.unwrap() - 0.1).abs() < 1e-12);
        let k = m.effective_stiffness.unwrap();
        assert!((k.storage - 2.0).abs() < 1e-9);
        assert!((k.loss - 0.5).abs() < 1e-9);
        // hinge absorbs π·K″·θ0² per cycle
        let expected = -std::f64::consts::PI * 0.5 * 0.01;
        assert!((m.hinge_cycle_work - expected).abs() < 1e-4 * expected.abs());
    }

    #[test]
    fn zero_thrust_has_no_efficiency() {
        let kin = KinematicsSpec::at_frequency(1.0);
        let m = propulsion_metrics(&synthetic(0.0, 1.0), &kin).unwrap();
        assert_eq!(m.mean_thrust, 0.0);
        assert_eq!(m.efficiency, None);
        let m = propulsion_metrics(&synthetic(0.3, -1.0), &kin).unwrap();
        assert_eq!(m.mean_input_power, 0.0);
        assert_eq!(m.efficiency, None);
    }

    #[test]
    fn short_trace_rejected() {
        let kin = KinematicsSpec::at_frequency(0.5);
        assert!(matches!(
            propulsion_metrics(&synthetic(0.1, 1.0), &kin),
            Err(Error::InsufficientRecord { .. })
        ));
    }
}
