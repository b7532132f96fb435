use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Design, ProtocolConfig};
use crate::cld::{fit_prony, rku_complex_stiffness, PronyFit};
use crate::error::{Error, Result, ResultExt};
use crate::foil::{propulsion_metrics, simulate_constrained_with, strouhal, ConstrainedTrace, CycleMetrics, SimOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub design: String,
    pub heave_freq_hz: f64,
    pub strouhal: f64,
    pub metrics: CycleMetrics,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn designs(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !names.contains(&r.design.as_str()) {
                names.push(&r.design);
            }
        }
        names
    }

    pub fn rows_for<'a>(&'a self, design: &'a str) -> impl Iterator<Item = &'a SweepRow> + 'a {
        self.rows.iter().filter(move |r| r.design == design)
    }

    pub fn get(&self, design: &str, heave_freq_hz: f64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.design == design && r.heave_freq_hz == heave_freq_hz)
    }
}

/// Hinge model of one design: its RKU stiffness on the fit grid reduced to a Prony series.
pub fn fit_design_hinge(config: &ProtocolConfig, design: &Design) -> Result<PronyFit> {
    let layup = config.layup.to_layup()?.with_coverage(design.coverage());
    let samples = config
        .prony
        .fit_grid_hz
        .points()
        .iter()
        .map(|&f| {
            let w = 2.0 * PI * f;
            rku_complex_stiffness(&layup, w).map(|k| (w, k))
        })
        .collect::<Result<Vec<_>>>()?;
    fit_prony(&samples, config.prony.branches).context_with(|| format!("hinge fit for `{}`", design.name))
}

/// Everything a sweep produces, traces included.
#[derive(Clone, Debug)]
pub struct SweepRun {
    pub table: SweepTable,
    /// One per design, in config order.
    pub hinges: Vec<(String, PronyFit)>,
    /// Parallel to `table.rows`.
    pub traces: Vec<ConstrainedTrace>,
}

pub fn run_strouhal_campaign(config: &ProtocolConfig) -> Result<SweepRun> {
    config.validate()?;
    let hinges = config
        .designs
        .par_iter()
        .map(|d| fit_design_hinge(config, d).map(|fit| (d.name.clone(), fit)))
        .collect::<Result<Vec<_>>>()?;
    let freqs = config.sweep.heave_freq_grid_hz.points();
    let options = SimOptions {
        steps_per_cycle: config.sweep.steps_per_cycle,
    };
    let cells: Vec<(usize, usize)> = (0..config.designs.len())
        .flat_map(|d| (0..freqs.len()).map(move |f| (d, f)))
        .collect();
    let foil = config.foil.to_foil()?;
    let results = cells
        .par_iter()
        .map(|&(d, fi)| {
            let (name, hinge) = &hinges[d];
            let f = freqs[fi];
            let run = || -> Result<(SweepRow, ConstrainedTrace)> {
                let kin = config.sweep.kinematics(f)?;
                let trace = simulate_constrained_with(
                    &foil,
                    &kin,
                    hinge,
                    config.sweep.cycles,
                    config.sweep.warmup_cycles,
                    &options,
                )?;
                let metrics = propulsion_metrics(&trace, &kin)?;
                let row = SweepRow {
                    design: name.clone(),
                    heave_freq_hz: f,
                    strouhal: strouhal(&kin)?,
                    metrics,
                };
                Ok((row, trace))
            };
            run().context_with(|| format!("design `{name}` at {f} Hz"))
        })
        .collect::<Result<Vec<_>>>()?;
    if results.len() != config.designs.len() * freqs.len() {
        return Err(Error::Config("sweep table is incomplete".into()));
    }
    let (rows, traces) = results.into_iter().unzip();
    Ok(SweepRun {
        table: SweepTable { rows },
        hinges,
        traces,
    })
}

/// Constrained-foil campaign over the heave grid for every design.
///
/// Rows follow config design order, then Strouhal number.
pub fn run_strouhal_sweep(config: &ProtocolConfig) -> Result<SweepTable> {
    run_strouhal_campaign(config).map(|r| r.table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foil::simulate_constrained;

    #[test]
    fn single_cell_matches_direct_call() {
        let cfg = ProtocolConfig::from_toml_str(
            "[[designs]]\nname = \"c\"\ncoverage_pct = 66.7\n[sweep]\nheave_freq_grid_hz = \"1.5\"\ncycles = 3\nwarmup_cycles = 2\n[freeswim]\ndesigns = [\"c\"]\n",
            &[],
        )
        .unwrap();
        let table = run_strouhal_sweep(&cfg).unwrap();
        assert_eq!(table.rows.len(), 1);
        let hinge = fit_design_hinge(&cfg, cfg.design("c").unwrap()).unwrap();
        let kin = cfg.sweep.kinematics(1.5).unwrap();
        let tr = simulate_constrained(&cfg.foil.to_foil().unwrap(), &kin, &hinge, 3, 2).unwrap();
        let direct = propulsion_metrics(&tr, &kin).unwrap();
        assert_eq!(table.rows[0].metrics, direct);
        assert!((table.rows[0].strouhal - 0.6).abs() < 1e-12);
    }

    #[test]
    fn hinge_fits_are_accurate() {
        let cfg = ProtocolConfig::default();
        for d in &cfg.designs {
            let fit = fit_design_hinge(&cfg, d).unwrap();
            assert!(fit.fit_residual < 0.05, "{}: {}", d.name, fit.fit_residual);
        }
    }
}
