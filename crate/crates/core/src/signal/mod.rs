//! Torque–angle signal analysis: lock-in stiffness, loop energy, cycle means.

mod cycles;
mod lockin;
mod series;
mod synth;

pub use cycles::{cycle_average, hysteresis_loop_area};
pub use lockin::{lockin_extract, LockinResult, MIN_LOCKIN_CYCLES, THETA_NOISE_FLOOR};
pub use series::TimeSeries;
pub use synth::{
    synth_bender_pair, BenderPlant, BenderSettings, DEFAULT_SAMPLE_RATE, DEFAULT_THETA_AMPLITUDE,
};
pub(crate) use series::interp as interp_samples;
