//! CSV schemas for tables and traces.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bender::{ImpedanceRow, ImpedanceTable};
use super::freeswim::SwimRow;
use super::sweep::{SweepRow, SweepTable};
use crate::cld::{rku_complex_stiffness, PronyFit, SandwichLayup};
use crate::error::{Error, Result};
use crate::foil::{ConstrainedTrace, CycleMetrics, FreeSwimTrace, SwimMetrics};
use crate::signal::{LockinResult, TimeSeries};
use crate::stiffness::{impedance_fractions, ComplexStiffness, ImpedanceFractions};

pub fn create_file(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::io(path, e))
}

pub fn open_file(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn write_records<W: Write, R: Serialize>(out: W, records: impl IntoIterator<Item = R>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

fn read_records<R: Read, T: for<'de> Deserialize<'de>>(input: R) -> Result<Vec<T>> {
    let mut rd = csv::Reader::from_reader(input);
    let rows = rd.deserialize().collect::<std::result::Result<Vec<T>, _>>()?;
    Ok(rows)
}

// ---- layup -----------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayupRecord {
    pub freq_hz: f64,
    pub k_storage: f64,
    pub k_loss: f64,
    pub f_elastic: f64,
    pub f_dissipative: f64,
}

/// Model stiffness of a layup over a frequency grid.
pub fn layup_table(layup: &SandwichLayup, freqs: &[f64]) -> Result<Vec<LayupRecord>> {
    freqs
        .iter()
        .map(|&f| {
            let k = rku_complex_stiffness(layup, 2.0 * std::f64::consts::PI * f)?;
            let fr = impedance_fractions(k)?;
            Ok(LayupRecord {
                freq_hz: f,
                k_storage: k.storage,
                k_loss: k.loss,
                f_elastic: fr.elastic,
                f_dissipative: fr.dissipative,
            })
        })
        .collect()
}

pub fn write_layup_csv<W: Write>(out: W, rows: &[LayupRecord]) -> Result<()> {
    write_records(out, rows)
}

// ---- impedance table -------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct ImpedanceRecord {
    design: String,
    freq_hz: f64,
    k_storage: f64,
    k_loss: f64,
    f_elastic: Option<f64>,
    f_dissipative: Option<f64>,
    loop_area_j: f64,
    k_storage_sd: f64,
    k_loss_sd: f64,
}

pub fn write_impedance_csv<W: Write>(out: W, table: &ImpedanceTable) -> Result<()> {
    write_records(
        out,
        table.rows.iter().map(|r| ImpedanceRecord {
            design: r.design.clone(),
            freq_hz: r.freq_hz,
            k_storage: r.stiffness.storage,
            k_loss: r.stiffness.loss,
            f_elastic: r.fractions.map(|f| f.elastic),
            f_dissipative: r.fractions.map(|f| f.dissipative),
            loop_area_j: r.loop_area_j,
            k_storage_sd: r.k_storage_sd,
            k_loss_sd: r.k_loss_sd,
        }),
    )
}

fn fractions_pair(elastic: Option<f64>, dissipative: Option<f64>) -> Result<Option<ImpedanceFractions>> {
    match (elastic, dissipative) {
        (Some(elastic), Some(dissipative)) => Ok(Some(ImpedanceFractions { elastic, dissipative })),
        (None, None) => Ok(None),
        _ => Err(Error::Config("fraction columns must both be set or both be empty".into())),
    }
}

fn stiffness_pair(storage: Option<f64>, loss: Option<f64>) -> Result<Option<ComplexStiffness>> {
    match (storage, loss) {
        (Some(s), Some(l)) => Ok(Some(ComplexStiffness::new(s, l))),
        (None, None) => Ok(None),
        _ => Err(Error::Config("stiffness columns must both be set or both be empty".into())),
    }
}

pub fn read_impedance_csv<R: Read>(input: R) -> Result<ImpedanceTable> {
    let rows = read_records::<_, ImpedanceRecord>(input)?
        .into_iter()
        .map(|r| {
            Ok(ImpedanceRow {
                fractions: fractions_pair(r.f_elastic, r.f_dissipative)?,
                design: r.design,
                freq_hz: r.freq_hz,
                stiffness: ComplexStiffness::new(r.k_storage, r.k_loss),
                loop_area_j: r.loop_area_j,
                k_storage_sd: r.k_storage_sd,
                k_loss_sd: r.k_loss_sd,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ImpedanceTable { rows })
}

// ---- sweep table -----------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct SweepRecord {
    design: String,
    heave_freq_hz: f64,
    strouhal: f64,
    mean_thrust_n: f64,
    mean_input_power_w: f64,
    efficiency: Option<f64>,
    k_storage: Option<f64>,
    k_loss: Option<f64>,
    f_elastic: Option<f64>,
    f_dissipative: Option<f64>,
    phase_lag_rad: Option<f64>,
    hinge_cycle_work_j: f64,
    pitch_amplitude_rad: f64,
}

pub fn write_sweep_csv<W: Write>(out: W, table: &SweepTable) -> Result<()> {
    write_records(
        out,
        table.rows.iter().map(|r| {
            let m = &r.metrics;
            SweepRecord {
                design: r.design.clone(),
                heave_freq_hz: r.heave_freq_hz,
                strouhal: r.strouhal,
                mean_thrust_n: m.mean_thrust,
                mean_input_power_w: m.mean_input_power,
                efficiency: m.efficiency,
                k_storage: m.effective_stiffness.map(|k| k.storage),
                k_loss: m.effective_stiffness.map(|k| k.loss),
                f_elastic: m.fractions.map(|f| f.elastic),
                f_dissipative: m.fractions.map(|f| f.dissipative),
                phase_lag_rad: m.phase_lag,
                hinge_cycle_work_j: m.hinge_cycle_work,
                pitch_amplitude_rad: m.pitch_amplitude,
            }
        }),
    )
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<SweepTable> {
    let rows = read_records::<_, SweepRecord>(input)?
        .into_iter()
        .map(|r| {
            Ok(SweepRow {
                metrics: CycleMetrics {
                    mean_thrust: r.mean_thrust_n,
                    mean_input_power: r.mean_input_power_w,
                    efficiency: r.efficiency,
                    effective_stiffness: stiffness_pair(r.k_storage, r.k_loss)?,
                    fractions: fractions_pair(r.f_elastic, r.f_dissipative)?,
                    phase_lag: r.phase_lag_rad,
                    hinge_cycle_work: r.hinge_cycle_work_j,
                    pitch_amplitude: r.pitch_amplitude_rad,
                },
                design: r.design,
                heave_freq_hz: r.heave_freq_hz,
                strouhal: r.strouhal,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { rows })
}

// ---- hinge fits ------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct HingeRecord {
    design: String,
    /// `inf` for the equilibrium spring, else the branch index.
    term: String,
    stiffness_nm_per_rad: f64,
    tau_s: Option<f64>,
    fit_residual: f64,
}

pub fn write_hinge_csv<W: Write>(out: W, hinges: &[(String, PronyFit)]) -> Result<()> {
    let mut records = Vec::new();
    for (name, fit) in hinges {
        records.push(HingeRecord {
            design: name.clone(),
            term: "inf".into(),
            stiffness_nm_per_rad: fit.k_inf,
            tau_s: None,
            fit_residual: fit.fit_residual,
        });
        for (i, b) in fit.branches.iter().enumerate() {
            records.push(HingeRecord {
                design: name.clone(),
                term: i.to_string(),
                stiffness_nm_per_rad: b.stiffness,
                tau_s: Some(b.tau),
                fit_residual: fit.fit_residual,
            });
        }
    }
    write_records(out, records)
}

// ---- traces ----------------------------------------------------------------

#[derive(Serialize)]
struct ConstrainedRecord {
    time_s: f64,
    heave_m: f64,
    pitch_rad: f64,
    thrust_n: f64,
    lateral_n: f64,
    power_w: f64,
}

pub fn write_constrained_trace_csv<W: Write>(out: W, trace: &ConstrainedTrace) -> Result<()> {
    write_records(
        out,
        (0..trace.len()).map(|i| ConstrainedRecord {
            time_s: trace.time[i],
            heave_m: trace.heave[i],
            pitch_rad: trace.pitch[i],
            thrust_n: trace.thrust[i],
            lateral_n: trace.lateral[i],
            power_w: trace.power[i],
        }),
    )
}

#[derive(Serialize)]
struct SwimRecord {
    time_s: f64,
    x_m: f64,
    u_mps: f64,
    a_mps2: f64,
    a_cycavg_mps2: f64,
    u_cycavg_mps: f64,
}

pub fn write_swim_trace_csv<W: Write>(out: W, trace: &FreeSwimTrace) -> Result<()> {
    write_records(
        out,
        (0..trace.len()).map(|i| SwimRecord {
            time_s: trace.time[i],
            x_m: trace.position[i],
            u_mps: trace.velocity[i],
            a_mps2: trace.acceleration[i],
            a_cycavg_mps2: trace.accel_cycavg[i],
            u_cycavg_mps: trace.velocity_cycavg[i],
        }),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct SwimMetricsRecord {
    design: String,
    peak_accel_mps2: f64,
    terminal_velocity_mps: f64,
    net_displacement_m: f64,
    total_travel_m: f64,
}

pub fn write_swim_metrics_csv<W: Write>(out: W, rows: &[SwimRow]) -> Result<()> {
    write_records(
        out,
        rows.iter().map(|r| SwimMetricsRecord {
            design: r.design.clone(),
            peak_accel_mps2: r.metrics.peak_accel,
            terminal_velocity_mps: r.metrics.terminal_velocity,
            net_displacement_m: r.metrics.net_displacement,
            total_travel_m: r.metrics.total_travel,
        }),
    )
}

pub fn read_swim_metrics_csv<R: Read>(input: R) -> Result<Vec<SwimRow>> {
    Ok(read_records::<_, SwimMetricsRecord>(input)?
        .into_iter()
        .map(|r| SwimRow {
            design: r.design,
            metrics: SwimMetrics {
                peak_accel: r.peak_accel_mps2,
                terminal_velocity: r.terminal_velocity_mps,
                net_displacement: r.net_displacement_m,
                total_travel: r.total_travel_m,
            },
        })
        .collect())
}

// ---- measured signals ------------------------------------------------------

/// Columns of a timestamped signal file; the first column is always `time_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalColumns {
    pub names: Vec<String>,
    pub time: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl SignalColumns {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i].as_slice())
    }

    /// Resamples one column onto a uniform [`TimeSeries`].
    pub fn series(&self, index: usize) -> Result<TimeSeries> {
        let pts: Vec<(f64, f64)> = self.time.iter().copied().zip(self.values[index].iter().copied()).collect();
        TimeSeries::from_timestamped(&pts)
    }
}

/// Reads `time_s,<name>...` with a header row. Blank lines and `#` comments are skipped.
pub fn read_signal_csv<R: Read>(input: R) -> Result<SignalColumns> {
    let mut rd = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header.len() < 2 {
        return Err(Error::Arity(format!(
            "signal file needs a time column and at least one value column, got {}",
            header.len()
        )));
    }
    if header[0] != "time_s" {
        return Err(Error::Config(format!("first column must be `time_s`, got `{}`", header[0])));
    }
    let mut time = Vec::new();
    let mut values = vec![Vec::new(); header.len() - 1];
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(Error::Arity(format!(
                "row {} has {} fields, header has {}",
                line + 2,
                rec.len(),
                header.len()
            )));
        }
        let mut nums = rec.iter().map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Config(format!("row {}: `{s}` is not a finite number", line + 2)))
        });
        time.push(nums.next().expect("non-empty record")?);
        for col in values.iter_mut() {
            col.push(nums.next().expect("arity checked")?);
        }
    }
    if time.is_empty() {
        return Err(Error::InsufficientRecord {
            needed: 1,
            available: 0.0,
        });
    }
    Ok(SignalColumns {
        names: header[1..].to_vec(),
        time,
        values,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractRecord {
    pub freq_hz: f64,
    pub k_storage: f64,
    pub k_loss: f64,
    pub phase_lag_rad: f64,
    pub f_elastic: Option<f64>,
    pub f_dissipative: Option<f64>,
    pub coherence: f64,
}

impl ExtractRecord {
    pub fn new(freq_hz: f64, r: &LockinResult) -> Self {
        let fr = impedance_fractions(r.stiffness).ok();
        Self {
            freq_hz,
            k_storage: r.stiffness.storage,
            k_loss: r.stiffness.loss,
            phase_lag_rad: r.phase_lag,
            f_elastic: fr.map(|f| f.elastic),
            f_dissipative: fr.map(|f| f.dissipative),
            coherence: r.coherence,
        }
    }
}

pub fn write_extract_csv<W: Write>(out: W, rec: &ExtractRecord) -> Result<()> {
    write_records(out, [rec])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foil::SwimMetrics;

    fn impedance() -> ImpedanceTable {
        ImpedanceTable {
            rows: vec![
                ImpedanceRow {
                    design: "baseline".into(),
                    freq_hz: 0.5,
                    stiffness: ComplexStiffness::new(0.0279, 0.0),
                    fractions: Some(ImpedanceFractions {
                        elastic: 1.0,
                        dissipative: 0.0,
                    }),
                    loop_area_j: 1.0e-19,
                    k_storage_sd: 0.0,
                    k_loss_sd: 0.0,
                },
                ImpedanceRow {
                    design: "c".into(),
                    freq_hz: 1.0 / 3.0,
                    stiffness: ComplexStiffness::new(0.1 + 0.2, -1e-5),
                    fractions: None,
                    loop_area_j: std::f64::consts::PI,
                    k_storage_sd: 0.1,
                    k_loss_sd: 2.5e-300,
                },
            ],
        }
    }

    #[test]
    fn impedance_round_trip() {
        let t = impedance();
        let mut buf = Vec::new();
        write_impedance_csv(&mut buf, &t).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("design,freq_hz,k_storage,k_loss,f_elastic,f_dissipative,loop_area_j,"));
        assert_eq!(read_impedance_csv(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn sweep_round_trip() {
        let m = CycleMetrics {
            mean_thrust: 0.123456789012345,
            mean_input_power: 1.0 / 7.0,
            efficiency: None,
            effective_stiffness: Some(ComplexStiffness::new(0.2, 0.05)),
            fractions: Some(ImpedanceFractions {
                elastic: 0.8,
                dissipative: 0.2,
            }),
            phase_lag: Some(0.24),
            hinge_cycle_work: -1e-4,
            pitch_amplitude: 0.3,
        };
        let mut m2 = m;
        m2.effective_stiffness = None;
        m2.fractions = None;
        m2.phase_lag = None;
        m2.efficiency = Some(0.25);
        let t = SweepTable {
            rows: vec![
                SweepRow {
                    design: "a".into(),
                    heave_freq_hz: 0.5,
                    strouhal: 0.2,
                    metrics: m,
                },
                SweepRow {
                    design: "a, quoted".into(),
                    heave_freq_hz: 2.0,
                    strouhal: 0.8,
                    metrics: m2,
                },
            ],
        };
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &t).unwrap();
        assert_eq!(read_sweep_csv(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn swim_metrics_round_trip() {
        let rows = vec![SwimRow {
            design: "c".into(),
            metrics: SwimMetrics {
                peak_accel: 0.01,
                terminal_velocity: 0.02,
                net_displacement: 0.05,
                total_travel: 0.0500001,
            },
        }];
        let mut buf = Vec::new();
        write_swim_metrics_csv(&mut buf, &rows).unwrap();
        assert_eq!(read_swim_metrics_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn signal_files() {
        let text = "# bench log\ntime_s, theta_rad, torque_nm\n0, 0, 1\n0.5, 1, 2\n\n1.0, 2, 3\n";
        let cols = read_signal_csv(text.as_bytes()).unwrap();
        assert_eq!(cols.names, vec!["theta_rad", "torque_nm"]);
        assert_eq!(cols.time, vec![0.0, 0.5, 1.0]);
        assert_eq!(cols.column("torque_nm").unwrap(), &[1.0, 2.0, 3.0]);
        let s = cols.series(0).unwrap();
        assert_eq!(s.sample_rate(), 2.0);

        for bad in ["", "time_s\n1\n", "t,v\n1,2\n", "time_s,v\n1,x\n", "time_s,v\n1,2,3\n", "time_s,v\n", "time_s,v\n1,inf\n"] {
            assert!(read_signal_csv(bad.as_bytes()).is_err(), "{bad:?}");
        }
    }
}
