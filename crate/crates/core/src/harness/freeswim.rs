use serde::{Deserialize, Serialize};

use super::config::ProtocolConfig;
use super::sweep::fit_design_hinge;
use crate::error::Result;
use crate::foil::{simulate_free_swim_with, swim_metrics, FreeSwimTrace, SimOptions, SwimMetrics};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwimRow {
    pub design: String,
    pub metrics: SwimMetrics,
}

#[derive(Clone, Debug)]
pub struct FreeSwimRun {
    pub design: String,
    pub trace: FreeSwimTrace,
    pub metrics: SwimMetrics,
}

/// Virtual-mass trial of one design at the configured free-swim kinematics.
pub fn run_freeswim_trial(config: &ProtocolConfig, design_name: &str) -> Result<FreeSwimRun> {
    config.validate()?;
    let design = config.design(design_name)?;
    let annotate = |e: crate::Error| e.context(format!("free swim of `{design_name}`"));
    let hinge = fit_design_hinge(config, design)?;
    let kin = config.freeswim.kinematics(&config.sweep)?;
    let options = SimOptions {
        steps_per_cycle: config.sweep.steps_per_cycle,
    };
    let trace = simulate_free_swim_with(
        &config.foil.to_foil()?,
        &kin,
        &hinge,
        &config.freeswim.params(),
        &options,
    )
    .map_err(annotate)?;
    let metrics = swim_metrics(&trace).map_err(annotate)?;
    Ok(FreeSwimRun {
        design: design.name.clone(),
        trace,
        metrics,
    })
}
