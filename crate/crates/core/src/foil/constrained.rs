use serde::{Deserialize, Serialize};

use super::config::{FoilConfig, KinematicsSpec};
use super::dynamics::{check_finite, plan_steps, FoilModel, StepPlan};
use crate::cld::PronyFit;
use crate::error::{Error, Result};
use crate::ode::{OdeSystem, Rk4};
use crate::signal::TimeSeries;

/// Integration controls shared by both simulation modes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    /// Fixed RK4 steps per heave period. `None` picks the step automatically.
    pub steps_per_cycle: Option<usize>,
}

/// Uniformly sampled record of a constrained run, warm-up excluded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedTrace {
    pub sample_rate: f64,
    pub time: Vec<f64>,
    pub heave: Vec<f64>,
    pub heave_velocity: Vec<f64>,
    pub pitch: Vec<f64>,
    pub pitch_rate: Vec<f64>,
    pub thrust: Vec<f64>,
    pub lateral: Vec<f64>,
    pub power: Vec<f64>,
    /// Moment in the viscoelastic hinge, N·m.
    pub hinge_moment: Vec<f64>,
    pub angle_of_attack: Vec<f64>,
    pub plan: StepPlan,
}

impl ConstrainedTrace {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn series(&self, values: &[f64]) -> Result<TimeSeries> {
        TimeSeries::new(self.sample_rate, values.to_vec(), self.time.first().copied().unwrap_or(0.0))
    }
}

struct Constrained<'a> {
    model: FoilModel<'a>,
}

impl OdeSystem for Constrained<'_> {
    fn dim(&self) -> usize {
        2 + self.model.hinge.n_states()
    }

    fn rates(&self, t: f64, y: &[f64], dydt: &mut [f64]) {
        let loads = self.model.loads(t, y[0], y[1], &y[2..], self.model.kin.freestream);
        dydt[0] = y[1];
        dydt[1] = loads.pitch_acc;
        self.model.hinge.state_rates(y[0], &y[2..], &mut dydt[2..]);
    }
}

pub fn simulate_constrained(
    foil: &FoilConfig,
    kin: &KinematicsSpec,
    hinge: &PronyFit,
    n_cycles: usize,
    warmup_cycles: usize,
) -> Result<ConstrainedTrace> {
    simulate_constrained_with(foil, kin, hinge, n_cycles, warmup_cycles, &SimOptions::default())
}

pub fn simulate_constrained_with(
    foil: &FoilConfig,
    kin: &KinematicsSpec,
    hinge: &PronyFit,
    n_cycles: usize,
    warmup_cycles: usize,
    options: &SimOptions,
) -> Result<ConstrainedTrace> {
    foil.validate()?;
    kin.validate()?;
    hinge.validate()?;
    if n_cycles == 0 {
        return Err(Error::Domain("need at least one recorded cycle".into()));
    }
    let sys = Constrained {
        model: FoilModel::new(foil, kin, hinge),
    };
    let plan = plan_steps(&sys.model, options.steps_per_cycle)?;
    let out_per_cycle = plan.steps_per_cycle / plan.stride;
    let n_out = n_cycles * out_per_cycle + 1;
    let total_steps = (warmup_cycles + n_cycles) * plan.steps_per_cycle;
    let first_recorded = warmup_cycles * plan.steps_per_cycle;

    let mut trace = ConstrainedTrace {
        sample_rate: out_per_cycle as f64 * kin.heave_freq,
        time: Vec::with_capacity(n_out),
        heave: Vec::with_capacity(n_out),
        heave_velocity: Vec::with_capacity(n_out),
        pitch: Vec::with_capacity(n_out),
        pitch_rate: Vec::with_capacity(n_out),
        thrust: Vec::with_capacity(n_out),
        lateral: Vec::with_capacity(n_out),
        power: Vec::with_capacity(n_out),
        hinge_moment: Vec::with_capacity(n_out),
        angle_of_attack: Vec::with_capacity(n_out),
        plan,
    };
    let mut record = |t: f64, y: &[f64]| {
        let loads = sys.model.loads(t, y[0], y[1], &y[2..], kin.freestream);
        let (h, hv, _) = kin.heave(t);
        trace.time.push(t);
        trace.heave.push(h);
        trace.heave_velocity.push(hv);
        trace.pitch.push(y[0]);
        trace.pitch_rate.push(y[1]);
        trace.thrust.push(loads.thrust);
        trace.lateral.push(loads.lateral);
        trace.power.push(loads.power);
        trace.hinge_moment.push(loads.hinge_moment);
        trace.angle_of_attack.push(loads.alpha);
    };

    let mut y = vec![0.0; sys.dim()];
    let mut rk = Rk4::new(sys.dim());
    let time = |step: usize| step as f64 * plan.dt;
    for step in 0..total_steps {
        if step >= first_recorded && (step - first_recorded) % plan.stride == 0 {
            record(time(step), &y);
        }
        rk.step(&sys, time(step), &mut y, plan.dt);
        check_finite(&y, step + 1, time(step + 1))?;
    }
    record(time(total_steps), &y);
    debug_assert_eq!(trace.len(), n_out);
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cld::PronyBranch;

    fn hinge() -> PronyFit {
        PronyFit::new(0.1, vec![PronyBranch { stiffness: 0.05, tau: 0.02 }]).unwrap()
    }

    #[test]
    fn output_grid_is_uniform() {
        let kin = KinematicsSpec::at_frequency(1.0);
        let tr = simulate_constrained(&FoilConfig::default(), &kin, &hinge(), 3, 1).unwrap();
        assert_eq!(tr.len(), 3001);
        assert!((tr.sample_rate - 1000.0).abs() < 1e-12);
        assert!((tr.time[0] - 1.0).abs() < 1e-12);
        assert!((tr.time[3000] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn coarse_step_rejected() {
        let kin = KinematicsSpec::at_frequency(1.0);
        let opts = SimOptions {
            steps_per_cycle: Some(100),
        };
        let r = simulate_constrained_with(&FoilConfig::default(), &kin, &hinge(), 3, 0, &opts);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn divergence_is_reported() {
        let kin = KinematicsSpec::at_frequency(1.0);
        let foil = FoilConfig {
            tail_inertia: 1e-12,
            added_mass_coeff: 0.0,
            ..FoilConfig::default()
        };
        let stiff = PronyFit::spring(1e9).unwrap();
        let opts = SimOptions {
            steps_per_cycle: Some(1000),
        };
        let r = simulate_constrained_with(&foil, &kin, &stiff, 1, 0, &opts);
        assert!(matches!(r, Err(Error::Divergence { .. })), "{r:?}");
    }

    #[test]
    fn pure_drag_at_negligible_heave() {
        let kin = KinematicsSpec::new(0.5, 1e-9, 0.2).unwrap();
        let foil = FoilConfig::default();
        let tr = simulate_constrained(&foil, &kin, &hinge(), 3, 0).unwrap();
        let drag = 0.5 * foil.fluid_density * 0.04 * foil.area() * foil.profile_drag_coeff;
        for t in &tr.thrust {
            assert!((t + drag).abs() < 1e-9 * drag);
        }
    }

    #[test]
    fn deterministic() {
        let kin = KinematicsSpec::at_frequency(2.0);
        let a = simulate_constrained(&FoilConfig::default(), &kin, &hinge(), 3, 1).unwrap();
        let b = simulate_constrained(&FoilConfig::default(), &kin, &hinge(), 3, 1).unwrap();
        assert_eq!(a, b);
    }
}
