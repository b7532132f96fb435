//! Run directories and end-to-end protocol execution.
//!
//! Each run gets `<output_dir>/<stamp>_<command>/` holding its tables, traces,
//! figures and a `manifest.toml` with the resolved config. Computation happens
//! first; files are written afterwards from one thread in a fixed order.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::bender::{run_bender_sweep, ImpedanceTable};
use super::config::ProtocolConfig;
use super::freeswim::{run_freeswim_trial, FreeSwimRun, SwimRow};
use super::io::{
    create_file, write_constrained_trace_csv, write_hinge_csv, write_impedance_csv, write_swim_metrics_csv,
    write_swim_trace_csv, write_sweep_csv,
};
use super::plot::{emit_plot_data, PlotKind, PlotSource};
use super::sweep::{run_strouhal_campaign, SweepRun};
use crate::error::{Error, Result};
use crate::CONFIG_SCHEMA_VERSION;

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Clone, Debug)]
pub struct RunDir {
    path: PathBuf,
    files: Vec<PathBuf>,
}

impl RunDir {
    /// Creates a fresh directory; a numeric suffix is added if the name is taken.
    pub fn create(base: &Path, command: &str, stamp: &str) -> Result<Self> {
        std::fs::create_dir_all(base).map_err(|e| Error::io(base, e))?;
        let stem = format!("{stamp}_{command}");
        let mut path = base.join(&stem);
        let mut n = 1;
        loop {
            match std::fs::create_dir(&path) {
                Ok(()) => break,
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists && n < 1000 => {
                    n += 1;
                    path = base.join(format!("{stem}-{n}"));
                }
                Err(e) => return Err(Error::io(&path, e)),
            }
        }
        Ok(Self { path, files: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.files
    }

    /// Writes one file inside the run directory.
    pub fn write_with(&mut self, name: &str, f: impl FnOnce(&mut std::fs::File) -> Result<()>) -> Result<PathBuf> {
        let path = self.path.join(name);
        let mut file = create_file(&path)?;
        f(&mut file).map_err(|e| match e {
            Error::Io { source, .. } => Error::io(&path, source),
            other => other.context(path.display().to_string()),
        })?;
        self.files.push(path.clone());
        Ok(path)
    }

    pub fn plot(&mut self, source: PlotSource<'_>, kind: PlotKind) -> Result<()> {
        let written = emit_plot_data(source, kind, &self.path)?;
        self.files.extend(written);
        Ok(())
    }

    pub fn write_manifest(&mut self, command: &str, stamp: &str, config: &ProtocolConfig) -> Result<PathBuf> {
        let files = self
            .files
            .iter()
            .filter_map(|p| p.strip_prefix(&self.path).ok())
            .map(|p| p.display().to_string())
            .collect();
        let manifest = Manifest {
            toolkit: env!("CARGO_PKG_NAME"),
            toolkit_version: TOOLKIT_VERSION,
            schema_version: CONFIG_SCHEMA_VERSION,
            command,
            created: stamp,
            files,
            config,
        };
        let text = toml::to_string(&manifest).map_err(|e| Error::Config(format!("manifest: {e}")))?;
        self.write_with(MANIFEST_FILE, |f| {
            f.write_all(text.as_bytes()).map_err(|e| Error::io(MANIFEST_FILE, e))
        })
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    toolkit: &'a str,
    toolkit_version: &'a str,
    schema_version: u32,
    command: &'a str,
    created: &'a str,
    files: Vec<String>,
    config: &'a ProtocolConfig,
}

fn freq_tag(f: f64) -> String {
    format!("{f}hz").replace('.', "p")
}

pub fn execute_bender(config: &ProtocolConfig, dir: &mut RunDir) -> Result<ImpedanceTable> {
    let table = run_bender_sweep(config)?;
    dir.write_with("impedance.csv", |f| write_impedance_csv(f, &table))?;
    dir.plot(PlotSource::Impedance(&table), PlotKind::Impedance)?;
    dir.plot(PlotSource::Impedance(&table), PlotKind::Fractions)?;
    Ok(table)
}

pub fn execute_sweep(config: &ProtocolConfig, dir: &mut RunDir) -> Result<SweepRun> {
    let run = run_strouhal_campaign(config)?;
    dir.write_with("sweep_metrics.csv", |f| write_sweep_csv(f, &run.table))?;
    dir.write_with("hinge_fits.csv", |f| write_hinge_csv(f, &run.hinges))?;
    for (row, trace) in run.table.rows.iter().zip(&run.traces) {
        let name = format!("trace_{}_{}.csv", row.design, freq_tag(row.heave_freq_hz));
        dir.write_with(&name, |f| write_constrained_trace_csv(f, trace))?;
    }
    for kind in [PlotKind::Thrust, PlotKind::Efficiency, PlotKind::Fractions] {
        // efficiency is undefined when no grid point makes thrust
        match dir.plot(PlotSource::Sweep(&run.table), kind) {
            Err(Error::Config(msg)) if kind == PlotKind::Efficiency => log::warn!("{msg}"),
            other => other?,
        }
    }
    let top = config.sweep.heave_freq_grid_hz.points().last().copied();
    for (row, trace) in run.table.rows.iter().zip(&run.traces) {
        if Some(row.heave_freq_hz) == top {
            dir.plot(
                PlotSource::Constrained {
                    design: &row.design,
                    trace,
                },
                PlotKind::Trace,
            )?;
        }
    }
    Ok(run)
}

pub fn execute_freeswim(config: &ProtocolConfig, designs: &[String], dir: &mut RunDir) -> Result<Vec<FreeSwimRun>> {
    use rayon::prelude::*;
    let runs = designs
        .par_iter()
        .map(|d| run_freeswim_trial(config, d))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<SwimRow> = runs
        .iter()
        .map(|r| SwimRow {
            design: r.design.clone(),
            metrics: r.metrics,
        })
        .collect();
    dir.write_with("swim_metrics.csv", |f| write_swim_metrics_csv(f, &rows))?;
    for r in &runs {
        dir.write_with(&format!("freeswim_{}.csv", r.design), |f| write_swim_trace_csv(f, &r.trace))?;
        dir.plot(
            PlotSource::FreeSwim {
                design: &r.design,
                trace: &r.trace,
            },
            PlotKind::Trace,
        )?;
    }
    Ok(runs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(p: &Path) -> Vec<u8> {
        std::fs::read(p).unwrap()
    }

    #[test]
    fn bender_run_is_byte_identical() {
        let cfg = ProtocolConfig::from_toml_str("[bender]\nfreq_grid_hz = \"0:2:1\"\n", &[]).unwrap();
        let base = tempfile::tempdir().unwrap();
        let mut a = RunDir::create(base.path(), "bender", "t0").unwrap();
        let mut b = RunDir::create(base.path(), "bender", "t0").unwrap();
        assert_ne!(a.path(), b.path());
        assert!(b.path().ends_with("t0_bender-2"));
        execute_bender(&cfg, &mut a).unwrap();
        execute_bender(&cfg, &mut b).unwrap();
        assert_eq!(a.files().len(), b.files().len());
        for (x, y) in a.files().iter().zip(b.files()) {
            assert_eq!(read(x), read(y), "{}", x.display());
        }
        a.write_manifest("bender", "t0", &cfg).unwrap();
        let text = std::fs::read_to_string(a.path().join(MANIFEST_FILE)).unwrap();
        let value: toml::Table = text.parse().unwrap();
        assert_eq!(value["command"].as_str(), Some("bender"));
        let files = value["files"].as_array().unwrap();
        assert!(files.iter().any(|f| f.as_str() == Some("impedance.csv")));
        // the embedded config reloads to the same settings
        let cfg_text = toml::to_string(&value["config"]).unwrap();
        assert_eq!(ProtocolConfig::from_toml_str(&cfg_text, &[]).unwrap(), cfg);
    }

    #[test]
    fn freq_tags() {
        assert_eq!(freq_tag(0.75), "0p75hz");
        assert_eq!(freq_tag(2.0), "2hz");
    }
}
