//! Scripted protocols over the model, simulator and signal tools.

mod bender;
mod config;
mod freeswim;
mod grid;
pub mod io;
pub mod plot;
mod run;
mod sweep;

pub use bender::{run_bender_sweep, ImpedanceRow, ImpedanceTable};
pub use config::*;
pub use freeswim::{run_freeswim_trial, FreeSwimRun, SwimRow};
pub use grid::{parse_grid, Grid, MAX_GRID_POINTS};
pub use plot::{emit_plot_data, PlotKind, PlotSource};
pub use run::{execute_bender, execute_freeswim, execute_sweep, RunDir, MANIFEST_FILE, TOOLKIT_VERSION};
pub use sweep::{fit_design_hinge, run_strouhal_campaign, run_strouhal_sweep, SweepRow, SweepRun, SweepTable};
