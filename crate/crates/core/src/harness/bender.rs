use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Design, ProtocolConfig};
use crate::cld::{rku_complex_stiffness, SandwichLayup};
use crate::error::{Error, Result, ResultExt};
use crate::signal::{hysteresis_loop_area, lockin_extract, synth_bender_pair, BenderPlant};
use crate::stiffness::{impedance_fractions, ComplexStiffness, ImpedanceFractions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImpedanceRow {
    pub design: String,
    pub freq_hz: f64,
    pub stiffness: ComplexStiffness,
    /// `None` when noise drives the loss estimate negative.
    pub fractions: Option<ImpedanceFractions>,
    /// Energy dissipated per cycle, J.
    pub loop_area_j: f64,
    /// Sample standard deviations over repeats; zero for a single repeat.
    pub k_storage_sd: f64,
    pub k_loss_sd: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ImpedanceTable {
    pub rows: Vec<ImpedanceRow>,
}

impl ImpedanceTable {
    pub fn designs(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !names.contains(&r.design.as_str()) {
                names.push(&r.design);
            }
        }
        names
    }

    pub fn rows_for<'a>(&'a self, design: &'a str) -> impl Iterator<Item = &'a ImpedanceRow> + 'a {
        self.rows.iter().filter(move |r| r.design == design)
    }
}

/// Seed for one (design, grid point, repeat) cell, derived from the global seed
/// so that cells are independent of evaluation order.
pub(crate) fn cell_seed(global: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(global);
    rng.set_stream(stream);
    rng.next_u64()
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn bender_point(
    config: &ProtocolConfig,
    layup: &SandwichLayup,
    design: &Design,
    freq: f64,
    stream: u64,
) -> Result<ImpedanceRow> {
    let layup = layup.with_coverage(design.coverage());
    let omega = 2.0 * std::f64::consts::PI * freq;
    let model = rku_complex_stiffness(&layup, omega)?;
    if freq == 0.0 {
        // lock-in is undefined at DC; the static stiffness stores everything
        return Ok(ImpedanceRow {
            design: design.name.clone(),
            freq_hz: 0.0,
            stiffness: model,
            fractions: Some(impedance_fractions(model)?),
            loop_area_j: 0.0,
            k_storage_sd: 0.0,
            k_loss_sd: 0.0,
        });
    }
    let plant = BenderPlant::Stiffness(model);
    let repeats = config.bender.repeats;
    let mut storage = Vec::with_capacity(repeats);
    let mut loss = Vec::with_capacity(repeats);
    let mut area = Vec::with_capacity(repeats);
    for rep in 0..repeats {
        let seed = cell_seed(config.seed, stream * 1_000_003 + rep as u64);
        let (theta, torque) = synth_bender_pair(&plant, &config.bender.settings(freq, seed))?;
        let lock = lockin_extract(&theta, &torque, freq)?;
        storage.push(lock.stiffness.storage);
        loss.push(lock.stiffness.loss);
        area.push(hysteresis_loop_area(&theta, &torque, freq)?);
    }
    let (k_storage, k_storage_sd) = mean_sd(&storage);
    let (k_loss, k_loss_sd) = mean_sd(&loss);
    let stiffness = ComplexStiffness::new(k_storage, k_loss);
    Ok(ImpedanceRow {
        design: design.name.clone(),
        freq_hz: freq,
        stiffness,
        fractions: impedance_fractions(stiffness).ok(),
        loop_area_j: mean_sd(&area).0,
        k_storage_sd,
        k_loss_sd,
    })
}

/// Synthetic bending-rig campaign: every design at every bender frequency.
///
/// Rows follow config design order, then frequency.
pub fn run_bender_sweep(config: &ProtocolConfig) -> Result<ImpedanceTable> {
    config.validate()?;
    let layup = config.layup.to_layup()?;
    let freqs = config.bender.freq_grid_hz.points();
    let cells: Vec<(usize, usize)> = (0..config.designs.len())
        .flat_map(|d| (0..freqs.len()).map(move |f| (d, f)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(d, f)| {
            let design = &config.designs[d];
            let stream = (d * freqs.len() + f) as u64;
            bender_point(config, &layup, design, freqs[f], stream)
                .context_with(|| format!("design `{}` at {} Hz", design.name, freqs[f]))
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.len() != config.designs.len() * freqs.len() {
        return Err(Error::Config("bender table is incomplete".into()));
    }
    Ok(ImpedanceTable { rows })
}
