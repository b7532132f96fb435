use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prescribed heave kinematics and freestream.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KinematicsSpec {
    /// Hz
    pub heave_freq: f64,
    /// Peak-to-peak heave excursion, m.
    pub heave_amp_pp: f64,
    /// m/s
    pub freestream: f64,
}

pub const DEFAULT_HEAVE_AMP_PP: f64 = 0.08;
pub const DEFAULT_FREESTREAM: f64 = 0.2;

impl KinematicsSpec {
    pub fn new(heave_freq: f64, heave_amp_pp: f64, freestream: f64) -> Result<Self> {
        let k = Self {
            heave_freq,
            heave_amp_pp,
            freestream,
        };
        k.validate()?;
        Ok(k)
    }

    /// Protocol defaults at the given heave frequency.
    pub fn at_frequency(heave_freq: f64) -> Self {
        Self {
            heave_freq,
            heave_amp_pp: DEFAULT_HEAVE_AMP_PP,
            freestream: DEFAULT_FREESTREAM,
        }
    }

    /// A zero heave amplitude is accepted: it is the unactuated reference case.
    pub fn validate(&self) -> Result<()> {
        if !(self.heave_freq > 0.0 && self.heave_freq.is_finite()) {
            return Err(Error::Domain(format!(
                "heave frequency must be > 0, got {}",
                self.heave_freq
            )));
        }
        if !(self.heave_amp_pp >= 0.0 && self.heave_amp_pp.is_finite()) {
            return Err(Error::Domain(format!(
                "heave amplitude must be >= 0, got {}",
                self.heave_amp_pp
            )));
        }
        if !(self.freestream > 0.0 && self.freestream.is_finite()) {
            return Err(Error::Domain(format!(
                "freestream must be > 0, got {}",
                self.freestream
            )));
        }
        Ok(())
    }

    pub fn omega(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.heave_freq
    }

    pub fn period(&self) -> f64 {
        1.0 / self.heave_freq
    }

    /// Heave position, velocity and acceleration at time `t`.
    pub fn heave(&self, t: f64) -> (f64, f64, f64) {
        let a = 0.5 * self.heave_amp_pp;
        let w = self.omega();
        let (s, c) = (w * t).sin_cos();
        (a * s, a * w * c, -a * w * w * s)
    }
}

/// `St = f·A_pp/U`.
pub fn strouhal(kin: &KinematicsSpec) -> Result<f64> {
    kin.validate()?;
    Ok(kin.heave_freq * kin.heave_amp_pp / kin.freestream)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StallModel {
    /// `C_N = a·sin α`
    None,
    /// `C_N = a·sin α·|cos α|`, attached flow with implicit roll-off.
    SinCos,
}

/// Rigid tail on a passive pitch hinge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoilConfig {
    /// m
    pub tail_chord: f64,
    /// m
    pub tail_span: f64,
    /// Tail moment of inertia about the hinge, kg·m².
    pub tail_inertia: f64,
    /// Hinge to tail quarter-chord, m.
    pub pitch_axis_offset: f64,
    /// kg/m³
    pub fluid_density: f64,
    /// per rad
    pub normal_force_slope: f64,
    pub stall_model: StallModel,
    pub profile_drag_coeff: f64,
    pub added_mass_coeff: f64,
}

// Default tail: a slender high-aspect-ratio blade. See the README for how
// these were chosen.
pub const DEFAULT_TAIL_CHORD: f64 = 0.023;
pub const DEFAULT_TAIL_SPAN: f64 = 0.278;
/// Flat-plate tail used for the default inertia: 1.4 mm PLA.
pub const DEFAULT_TAIL_THICKNESS: f64 = 1.4e-3;
pub const DEFAULT_TAIL_DENSITY: f64 = 1240.0;
/// Hinge to quarter chord.
pub const DEFAULT_PITCH_AXIS_OFFSET: f64 = 0.056;

/// Inertia about the hinge of a uniform flat plate whose leading edge sits
/// `offset - chord/4` behind the hinge.
pub fn flat_plate_inertia(chord: f64, span: f64, thickness: f64, density: f64, offset: f64) -> f64 {
    let mass = density * chord * span * thickness;
    let r_cg = offset + 0.25 * chord;
    mass * (chord * chord / 12.0 + r_cg * r_cg)
}

impl Default for FoilConfig {
    fn default() -> Self {
        Self {
            tail_chord: DEFAULT_TAIL_CHORD,
            tail_span: DEFAULT_TAIL_SPAN,
            tail_inertia: flat_plate_inertia(
                DEFAULT_TAIL_CHORD,
                DEFAULT_TAIL_SPAN,
                DEFAULT_TAIL_THICKNESS,
                DEFAULT_TAIL_DENSITY,
                DEFAULT_PITCH_AXIS_OFFSET,
            ),
            pitch_axis_offset: DEFAULT_PITCH_AXIS_OFFSET,
            fluid_density: 1000.0,
            normal_force_slope: 2.0 * std::f64::consts::PI,
            stall_model: StallModel::SinCos,
            profile_drag_coeff: 0.05,
            added_mass_coeff: 1.0,
        }
    }
}

impl FoilConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tail_chord", self.tail_chord),
            ("tail_span", self.tail_span),
            ("tail_inertia", self.tail_inertia),
            ("pitch_axis_offset", self.pitch_axis_offset),
            ("fluid_density", self.fluid_density),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be > 0, got {v}")));
            }
        }
        let non_negative = [
            ("normal_force_slope", self.normal_force_slope),
            ("profile_drag_coeff", self.profile_drag_coeff),
            ("added_mass_coeff", self.added_mass_coeff),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Planform area, m².
    pub fn area(&self) -> f64 {
        self.tail_chord * self.tail_span
    }

    /// Flat-plate added mass, `C_a·ρ·π(c/2)²·b`.
    pub fn added_mass(&self) -> f64 {
        let half = 0.5 * self.tail_chord;
        self.added_mass_coeff * self.fluid_density * std::f64::consts::PI * half * half * self.tail_span
    }

    /// Hinge to mid-chord, where the added-mass load acts.
    pub fn mid_chord_offset(&self) -> f64 {
        self.pitch_axis_offset + 0.25 * self.tail_chord
    }

    /// Pitch inertia including added mass, kg·m².
    pub fn effective_inertia(&self) -> f64 {
        let rm = self.mid_chord_offset();
        self.tail_inertia + self.added_mass() * rm * rm
    }
}
