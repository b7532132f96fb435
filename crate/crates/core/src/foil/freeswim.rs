use serde::{Deserialize, Serialize};

use super::config::{FoilConfig, KinematicsSpec};
use super::constrained::SimOptions;
use super::dynamics::{check_finite, plan_steps, FoilModel};
use crate::cld::PronyFit;
use crate::error::{Error, Result};
use crate::ode::{OdeSystem, Rk4};
use crate::signal::TimeSeries;

pub const DEFAULT_VIRTUAL_MASS: f64 = 3.0;
pub const DEFAULT_BODY_DRAG_COEFF: f64 = 0.3;
pub const DEFAULT_TRIAL_DURATION: f64 = 3.8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeSwimParams {
    /// kg
    pub virtual_mass: f64,
    pub body_drag_coeff: f64,
    /// Reference area for body drag, m². `None` uses the tail planform.
    pub body_area: Option<f64>,
    /// s
    pub duration: f64,
}

impl Default for FreeSwimParams {
    fn default() -> Self {
        Self {
            virtual_mass: DEFAULT_VIRTUAL_MASS,
            body_drag_coeff: DEFAULT_BODY_DRAG_COEFF,
            body_area: None,
            duration: DEFAULT_TRIAL_DURATION,
        }
    }
}

impl FreeSwimParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.virtual_mass > 0.0 && self.virtual_mass.is_finite()) {
            return Err(Error::Domain(format!(
                "virtual mass must be > 0, got {}",
                self.virtual_mass
            )));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::Domain(format!("duration must be > 0, got {}", self.duration)));
        }
        if !(self.body_drag_coeff >= 0.0 && self.body_drag_coeff.is_finite()) {
            return Err(Error::Domain(format!(
                "body drag coefficient must be >= 0, got {}",
                self.body_drag_coeff
            )));
        }
        if let Some(a) = self.body_area {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Domain(format!("body area must be > 0, got {a}")));
            }
        }
        Ok(())
    }
}

/// Carriage kinematics of a free-swimming trial, one sample per integrator step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeSwimTrace {
    pub sample_rate: f64,
    /// Heave period used for cycle averaging, s.
    pub period: f64,
    pub time: Vec<f64>,
    /// m
    pub position: Vec<f64>,
    /// m/s
    pub velocity: Vec<f64>,
    /// m/s²
    pub acceleration: Vec<f64>,
    pub accel_cycavg: Vec<f64>,
    pub velocity_cycavg: Vec<f64>,
    /// Tail thrust and body drag, N. Empty for traces built from kinematics alone.
    pub thrust: Vec<f64>,
    pub drag: Vec<f64>,
    pub pitch: Vec<f64>,
}

impl FreeSwimTrace {
    /// Builds the derived channels from a velocity record starting at `t = 0`.
    ///
    /// Position is the cumulative trapezoid of velocity. Before the first
    /// sample the carriage is taken to move at the initial velocity, which is
    /// zero for a standing start.
    pub fn from_velocity(sample_rate: f64, period: f64, velocity: Vec<f64>) -> Result<Self> {
        if velocity.is_empty() {
            return Err(Error::InsufficientRecord {
                needed: 1,
                available: 0.0,
            });
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::Domain(format!("period must be > 0, got {period}")));
        }
        let ts = TimeSeries::new(sample_rate, velocity, 0.0)?;
        let dt = ts.dt();
        let u = ts.into_samples();
        let n = u.len();
        let mut x = Vec::with_capacity(n);
        x.push(0.0);
        for i in 1..n {
            x.push(x[i - 1] + 0.5 * dt * (u[i - 1] + u[i]));
        }
        let mut acceleration = vec![0.0; n];
        if n > 1 {
            for i in 0..n {
                let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
                acceleration[i] = (u[b] - u[a]) / ((b - a) as f64 * dt);
            }
        }
        let (accel_cycavg, velocity_cycavg) = cycle_averages(&u, &x, sample_rate, period);
        Ok(Self {
            sample_rate,
            period,
            time: (0..n).map(|i| i as f64 * dt).collect(),
            position: x,
            velocity: u,
            acceleration,
            accel_cycavg,
            velocity_cycavg,
            thrust: Vec::new(),
            drag: Vec::new(),
            pitch: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }
}

/// Backward-looking one-period averages: `(u(t) − u(t−T))/T` and `(x(t) − x(t−T))/T`.
fn cycle_averages(u: &[f64], x: &[f64], fs: f64, period: f64) -> (Vec<f64>, Vec<f64>) {
    let lag = period * fs;
    let u0 = u[0];
    let past = |values: &[f64], p: f64, before: f64| -> f64 {
        if p >= 0.0 {
            crate::signal::interp_samples(values, p)
        } else {
            before
        }
    };
    let mut a = Vec::with_capacity(u.len());
    let mut v = Vec::with_capacity(u.len());
    for i in 0..u.len() {
        let p = i as f64 - lag;
        let u_back = past(u, p, u0);
        let x_back = past(x, p, x[0] + u0 * p / fs);
        a.push((u[i] - u_back) / period);
        v.push((x[i] - x_back) / period);
    }
    (a, v)
}

struct FreeSwim<'a> {
    model: FoilModel<'a>,
    mass: f64,
    drag_factor: f64,
}

impl FreeSwim<'_> {
    fn forces(&self, t: f64, y: &[f64]) -> (f64, f64, f64) {
        let u = y[2];
        let loads = self.model.loads(t, y[0], y[1], &y[3..], u);
        (loads.pitch_acc, loads.thrust, self.drag_factor * u * u.abs())
    }
}

impl OdeSystem for FreeSwim<'_> {
    fn dim(&self) -> usize {
        3 + self.model.hinge.n_states()
    }

    fn rates(&self, t: f64, y: &[f64], dydt: &mut [f64]) {
        let (pitch_acc, thrust, drag) = self.forces(t, y);
        dydt[0] = y[1];
        dydt[1] = pitch_acc;
        dydt[2] = (thrust - drag) / self.mass;
        self.model.hinge.state_rates(y[0], &y[3..], &mut dydt[3..]);
    }
}

/// Floor on automatic steps per heave period in free swimming.
pub const FREE_SWIM_MIN_STEPS: usize = 4000;

/// Tail driven in still water with its thrust accelerating a virtual mass from rest.
pub fn simulate_free_swim(
    foil: &FoilConfig,
    kin: &KinematicsSpec,
    hinge: &PronyFit,
    params: &FreeSwimParams,
) -> Result<FreeSwimTrace> {
    simulate_free_swim_with(foil, kin, hinge, params, &SimOptions::default())
}

pub fn simulate_free_swim_with(
    foil: &FoilConfig,
    kin: &KinematicsSpec,
    hinge: &PronyFit,
    params: &FreeSwimParams,
    options: &SimOptions,
) -> Result<FreeSwimTrace> {
    foil.validate()?;
    kin.validate()?;
    hinge.validate()?;
    params.validate()?;
    let area = params.body_area.unwrap_or_else(|| foil.area());
    let sys = FreeSwim {
        model: FoilModel::new(foil, kin, hinge),
        mass: params.virtual_mass,
        drag_factor: 0.5 * foil.fluid_density * params.body_drag_coeff * area,
    };
    let mut plan = plan_steps(&sys.model, options.steps_per_cycle)?;
    if options.steps_per_cycle.is_none() && plan.steps_per_cycle < FREE_SWIM_MIN_STEPS {
        // every step is logged, and the force record has to integrate back to
        // the momentum change
        let m = FREE_SWIM_MIN_STEPS.div_ceil(plan.steps_per_cycle);
        plan.steps_per_cycle *= m;
        plan.dt /= m as f64;
        plan.stride = 1;
    }
    let n_steps = ((params.duration / plan.dt).round() as usize).max(1);

    let mut y = vec![0.0; sys.dim()];
    let mut rk = Rk4::new(sys.dim());
    let mut velocity = Vec::with_capacity(n_steps + 1);
    let mut acceleration = Vec::with_capacity(n_steps + 1);
    let mut thrust = Vec::with_capacity(n_steps + 1);
    let mut drag = Vec::with_capacity(n_steps + 1);
    let mut pitch = Vec::with_capacity(n_steps + 1);
    let time = |step: usize| step as f64 * plan.dt;
    for step in 0..=n_steps {
        let t = time(step);
        let (_, th, dr) = sys.forces(t, &y);
        velocity.push(y[2]);
        acceleration.push((th - dr) / sys.mass);
        thrust.push(th);
        drag.push(dr);
        pitch.push(y[0]);
        if step < n_steps {
            rk.step(&sys, t, &mut y, plan.dt);
            check_finite(&y, step + 1, time(step + 1))?;
        }
    }

    let mut trace = FreeSwimTrace::from_velocity(1.0 / plan.dt, kin.period(), velocity)?;
    trace.acceleration = acceleration;
    trace.thrust = thrust;
    trace.drag = drag;
    trace.pitch = pitch;
    Ok(trace)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwimMetrics {
    /// Largest cycle-averaged acceleration, m/s².
    pub peak_accel: f64,
    /// Mean cycle-averaged velocity over the last fifth of the trial, m/s.
    pub terminal_velocity: f64,
    /// m
    pub net_displacement: f64,
    /// `∫|u| dt`, m.
    pub total_travel: f64,
}

pub fn swim_metrics(trace: &FreeSwimTrace) -> Result<SwimMetrics> {
    let n = trace.len();
    if n == 0 {
        return Err(Error::InsufficientRecord {
            needed: 1,
            available: 0.0,
        });
    }
    let peak_accel = trace
        .accel_cycavg
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let t_end = trace.time[n - 1];
    let cutoff = trace.time[0] + 0.8 * (t_end - trace.time[0]);
    let tail: Vec<f64> = trace
        .time
        .iter()
        .zip(&trace.velocity_cycavg)
        .filter(|(t, _)| **t >= cutoff - 1e-12 * t_end.abs())
        .map(|(_, v)| *v)
        .collect();
    let terminal_velocity = tail.iter().sum::<f64>() / tail.len() as f64;

    let dt = 1.0 / trace.sample_rate;
    let u = &trace.velocity;
    let mut total_travel = 0.0;
    for w in u.windows(2) {
        let (a, b) = (w[0], w[1]);
        total_travel += if a * b >= 0.0 {
            0.5 * dt * (a.abs() + b.abs())
        } else {
            // linear segment crosses zero
            0.5 * dt * (a * a + b * b) / (a.abs() + b.abs())
        };
    }
    Ok(SwimMetrics {
        peak_accel,
        terminal_velocity,
        net_displacement: trace.position[n - 1] - trace.position[0],
        total_travel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_velocity_metrics() {
        let (v0, fs) = (0.3, 100.0);
        let tr = FreeSwimTrace::from_velocity(fs, 0.5, vec![v0; 401]).unwrap();
        let m = swim_metrics(&tr).unwrap();
        assert!((m.terminal_velocity - v0).abs() < 1e-12);
        assert!(m.peak_accel.abs() < 1e-12);
        assert!((m.net_displacement - v0 * 4.0).abs() < 1e-12);
        assert!((m.total_travel - v0 * 4.0).abs() < 1e-12);
    }

    #[test]
    fn oscillating_velocity_travel() {
        let (v0, f, fs) = (0.2, 2.0, 1000.0);
        let u: Vec<f64> = (0..=3000).map(|i| v0 * (2.0 * PI * f * i as f64 / fs).sin()).collect();
        let tr = FreeSwimTrace::from_velocity(fs, 1.0 / f, u).unwrap();
        let m = swim_metrics(&tr).unwrap();
        assert!(m.net_displacement.abs() < 1e-6);
        let exact = 2.0 / PI * v0 * 3.0;
        assert!((m.total_travel - exact).abs() < 1e-4 * exact, "{}", m.total_travel);
    }

    #[test]
    fn accelerating_trace_travel_equals_displacement() {
        let u: Vec<f64> = (0..500).map(|i| (i as f64 * 0.01).powi(2)).collect();
        let tr = FreeSwimTrace::from_velocity(100.0, 1.0, u).unwrap();
        let m = swim_metrics(&tr).unwrap();
        assert_eq!(m.net_displacement, m.total_travel);
    }

    #[test]
    fn empty_trace_rejected() {
        assert!(FreeSwimTrace::from_velocity(100.0, 1.0, vec![]).is_err());
    }
}
