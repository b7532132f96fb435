//! Heave-driven tail on a passive viscoelastic pitch hinge.

mod config;
mod constrained;
pub(crate) mod dynamics;
mod freeswim;
mod metrics;

pub use config::*;
pub use constrained::{simulate_constrained, simulate_constrained_with, ConstrainedTrace, SimOptions};
pub use dynamics::{StepPlan, BASE_STEPS_PER_CYCLE};
pub use freeswim::{
    simulate_free_swim, simulate_free_swim_with, swim_metrics, FreeSwimParams, FreeSwimTrace,
    SwimMetrics, DEFAULT_BODY_DRAG_COEFF, DEFAULT_TRIAL_DURATION, DEFAULT_VIRTUAL_MASS,
    FREE_SWIM_MIN_STEPS,
};
pub use metrics::{propulsion_metrics, CycleMetrics};
