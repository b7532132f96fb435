//! Quasi-steady loads on the heaving tail and its passive pitch equation.
//!
//! Sign conventions: the flow approaches at speed `U` along +x; `θ` is the
//! nose-up pitch of the tail chord, so a positive `θ` moves the trailing edge
//! towards −y. A chord point a distance `s` behind the hinge sees relative flow
//!
//! ```text
//! w_t = U cos θ + ẏ sin θ          (along the chord, towards the trailing edge)
//! w_n = U sin θ − ẏ cos θ + s θ̇    (along the upward chord normal)
//! ```
//!
//! and the circulatory normal force `F_N = ½ρS·C_N(α)·V²`, `α = atan2(w_n, w_t)`,
//! is applied at the quarter chord. The flat-plate added-mass force acts at
//! mid-chord and does not contribute to thrust.

use serde::{Deserialize, Serialize};

use super::config::{FoilConfig, KinematicsSpec, StallModel};
use crate::cld::PronyFit;
use crate::error::{Error, Result};

/// Loads at one instant.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Loads {
    pub alpha: f64,
    pub pitch_acc: f64,
    /// Upstream-positive streamwise force, N.
    pub thrust: f64,
    /// Fluid force on the foil along +y, N.
    pub lateral: f64,
    /// Power the heave actuator delivers, W.
    pub power: f64,
    /// Moment carried by the viscoelastic hinge, N·m.
    pub hinge_moment: f64,
}

pub(crate) struct FoilModel<'a> {
    pub kin: &'a KinematicsSpec,
    pub hinge: &'a PronyFit,
    half_rho_s: f64,
    slope: f64,
    drag_coeff: f64,
    stall: StallModel,
    added_mass: f64,
    r_qc: f64,
    r_mid: f64,
    inertia: f64,
}

impl<'a> FoilModel<'a> {
    pub fn new(foil: &FoilConfig, kin: &'a KinematicsSpec, hinge: &'a PronyFit) -> Self {
        Self {
            kin,
            hinge,
            half_rho_s: 0.5 * foil.fluid_density * foil.area(),
            slope: foil.normal_force_slope,
            drag_coeff: foil.profile_drag_coeff,
            stall: foil.stall_model,
            added_mass: foil.added_mass(),
            r_qc: foil.pitch_axis_offset,
            r_mid: foil.mid_chord_offset(),
            inertia: foil.effective_inertia(),
        }
    }

    /// Loads for pitch state `(theta, theta_dot)`, dashpot states `z` and
    /// oncoming flow speed `flow` at time `t`.
    pub fn loads(&self, t: f64, theta: f64, theta_dot: f64, z: &[f64], flow: f64) -> Loads {
        let (_, yd, ydd) = self.kin.heave(t);
        let (s, c) = theta.sin_cos();

        let w_t = flow * c + yd * s;
        let w_n = flow * s - yd * c + self.r_qc * theta_dot;
        let alpha = w_n.atan2(w_t);
        let normal = match self.stall {
            // ½ρS·a·sinα|cosα|·V² = ½ρS·a·w_n|w_t|
            StallModel::SinCos => self.half_rho_s * self.slope * w_n * w_t.abs(),
            StallModel::None => self.half_rho_s * self.slope * w_n * w_n.hypot(w_t),
        };
        let tangential = self.half_rho_s * self.drag_coeff * w_t * w_t.abs();

        let hinge_moment = self.hinge.moment(theta, z);
        // normal acceleration of the mid-chord without the θ̈ term
        let a_n0 = ydd * c - yd * s * theta_dot;
        let pitch_acc = (-hinge_moment - self.r_qc * normal + self.added_mass * self.r_mid * a_n0)
            / self.inertia;
        let added = -self.added_mass * (a_n0 - self.r_mid * pitch_acc);

        let thrust = -(normal * s + tangential * c);
        let lateral = (normal + added) * c - tangential * s;
        Loads {
            alpha,
            pitch_acc,
            thrust,
            lateral,
            power: -lateral * yd,
            hinge_moment,
        }
    }

    pub fn pitch_frequency_bound(&self) -> f64 {
        let k_hinge = self.hinge.k_inf + self.hinge.branches.iter().map(|b| b.stiffness).sum::<f64>();
        let v = self.kin.freestream + 0.5 * self.kin.heave_amp_pp * self.kin.omega();
        let k_fluid = self.half_rho_s * self.slope * self.r_qc * v * v;
        ((k_hinge + k_fluid) / self.inertia).sqrt()
    }
}

/// Integrator step plan: `steps_per_cycle` RK4 steps per heave period,
/// recording every `stride`-th step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepPlan {
    pub dt: f64,
    pub steps_per_cycle: usize,
    pub stride: usize,
}

pub const BASE_STEPS_PER_CYCLE: usize = 1000;

/// Chooses the step: 1000 steps per cycle, refined by an integer factor until
/// `dt ≤ min τ_j/10` and `dt·ω_pitch ≤ 0.5`. An explicit `steps_per_cycle`
/// is checked against the relaxation bound instead of refined.
pub(crate) fn plan_steps(model: &FoilModel<'_>, requested: Option<usize>) -> Result<StepPlan> {
    let f = model.kin.heave_freq;
    let tau_limit = model.hinge.min_tau().map_or(f64::INFINITY, |tau| tau / 10.0);
    let omega_limit = 0.5 / model.pitch_frequency_bound();
    match requested {
        Some(steps) => {
            let dt = 1.0 / (steps as f64 * f);
            if steps == 0 || dt > tau_limit {
                return Err(Error::Config(format!(
                    "time step {dt:e} s exceeds the stability bound min(tau)/10 = {tau_limit:e} s"
                )));
            }
            let stride = if steps % BASE_STEPS_PER_CYCLE == 0 {
                steps / BASE_STEPS_PER_CYCLE
            } else {
                1
            };
            Ok(StepPlan {
                dt,
                steps_per_cycle: steps,
                stride,
            })
        }
        None => {
            let base = 1.0 / (BASE_STEPS_PER_CYCLE as f64 * f);
            let limit = tau_limit.min(omega_limit);
            let m = ((base / limit).ceil() as usize).max(1);
            Ok(StepPlan {
                dt: base / m as f64,
                steps_per_cycle: BASE_STEPS_PER_CYCLE * m,
                stride: m,
            })
        }
    }
}

pub(crate) fn check_finite(y: &[f64], step: usize, time: f64) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergence { step, time })
    }
}
