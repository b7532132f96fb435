//! Protocol configuration file.
//!
//! TOML with one table per section. Every dimensional key carries its unit as
//! a suffix (`_mm`, `_mpa`, `_hz`, `_mps`, `_deg`, `_kg`, `_s`, `_pct`, ...);
//! values are converted to SI when the domain types are built.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::cld::{FractionalZenerParams, Layer, LayerKind, SandwichLayup, DEFAULT_CORE_ZENER};
use crate::error::{Error, Result};
use crate::foil::{FoilConfig, FreeSwimParams, KinematicsSpec, StallModel};
use crate::signal::BenderSettings;
use crate::CONFIG_SCHEMA_VERSION;

const MM: f64 = 1e-3;
const MPA: f64 = 1e6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LayupSection {
    pub length_mm: f64,
    pub width_mm: f64,
    pub base_thickness_mm: f64,
    pub base_modulus_mpa: f64,
    pub base_density_kgm3: f64,
    pub core_thickness_mm: f64,
    pub core_density_kgm3: f64,
    pub core_g_low_mpa: f64,
    pub core_g_high_mpa: f64,
    pub core_tau_s: f64,
    pub core_alpha: f64,
    pub constraining_thickness_mm: f64,
    pub constraining_modulus_mpa: f64,
    pub constraining_density_kgm3: f64,
}

impl Default for LayupSection {
    fn default() -> Self {
        let d = SandwichLayup::default();
        let z = DEFAULT_CORE_ZENER;
        Self {
            length_mm: d.length / MM,
            width_mm: d.width / MM,
            base_thickness_mm: d.base.thickness / MM,
            base_modulus_mpa: d.base.youngs_modulus().unwrap_or(0.0) / MPA,
            base_density_kgm3: d.base.density,
            core_thickness_mm: d.core.thickness / MM,
            core_density_kgm3: d.core.density,
            core_g_low_mpa: z.g_low / MPA,
            core_g_high_mpa: z.g_high / MPA,
            core_tau_s: z.tau,
            core_alpha: z.alpha,
            constraining_thickness_mm: d.constraining.thickness / MM,
            constraining_modulus_mpa: d.constraining.youngs_modulus().unwrap_or(0.0) / MPA,
            constraining_density_kgm3: d.constraining.density,
        }
    }
}

impl LayupSection {
    /// Layup at full coverage; designs set their own coverage.
    pub fn to_layup(&self) -> Result<SandwichLayup> {
        let zener = FractionalZenerParams {
            g_low: self.core_g_low_mpa * MPA,
            g_high: self.core_g_high_mpa * MPA,
            tau: self.core_tau_s,
            alpha: self.core_alpha,
        };
        let layup = SandwichLayup {
            base: Layer::elastic(
                LayerKind::Base,
                self.base_thickness_mm * MM,
                self.base_modulus_mpa * MPA,
                self.base_density_kgm3,
            ),
            core: Layer::viscoelastic(self.core_thickness_mm * MM, zener, self.core_density_kgm3),
            constraining: Layer::elastic(
                LayerKind::Constraining,
                self.constraining_thickness_mm * MM,
                self.constraining_modulus_mpa * MPA,
                self.constraining_density_kgm3,
            ),
            length: self.length_mm * MM,
            width: self.width_mm * MM,
            coverage: 1.0,
        };
        layup.validate().map_err(|e| e.context("layup"))?;
        Ok(layup)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Design {
    pub name: String,
    pub coverage_pct: f64,
}

impl Design {
    pub fn new(name: &str, coverage_pct: f64) -> Self {
        Self {
            name: name.to_string(),
            coverage_pct,
        }
    }

    pub fn coverage(&self) -> f64 {
        self.coverage_pct / 100.0
    }
}

pub fn default_designs() -> Vec<Design> {
    vec![
        Design::new("baseline", 0.0),
        Design::new("a", 16.7),
        Design::new("b", 33.3),
        Design::new("c", 66.7),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenderSection {
    pub freq_grid_hz: Grid,
    /// Peak angle; the rig sweeps ±9°, i.e. 18° peak to peak.
    pub amplitude_deg: f64,
    pub sample_rate_hz: f64,
    pub cycles: usize,
    pub warmup_cycles: usize,
    /// Torque SNR; absent means noiseless.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_snr_db: Option<f64>,
    /// Independent noisy repeats averaged per grid point.
    pub repeats: usize,
}

impl Default for BenderSection {
    fn default() -> Self {
        Self {
            freq_grid_hz: Grid::range(0.0, 5.0, 0.5).expect("static grid"),
            amplitude_deg: 9.0,
            sample_rate_hz: 200.0,
            cycles: 10,
            warmup_cycles: 5,
            noise_snr_db: None,
            repeats: 1,
        }
    }
}

impl BenderSection {
    pub fn settings(&self, drive_freq: f64, seed: u64) -> BenderSettings {
        BenderSettings {
            drive_freq,
            theta_amp: self.amplitude_deg.to_radians(),
            sample_rate: self.sample_rate_hz,
            n_cycles: self.cycles,
            warmup_cycles: self.warmup_cycles,
            noise_snr_db: self.noise_snr_db,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PronySection {
    pub branches: usize,
    pub fit_grid_hz: Grid,
}

impl Default for PronySection {
    fn default() -> Self {
        Self {
            branches: 2,
            fit_grid_hz: Grid::range(0.25, 5.0, 0.25).expect("static grid"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FoilSection {
    pub chord_mm: f64,
    pub span_mm: f64,
    pub inertia_kgm2: f64,
    pub pitch_axis_offset_mm: f64,
    pub fluid_density_kgm3: f64,
    pub normal_force_slope_per_rad: f64,
    pub stall_model: StallModel,
    pub profile_drag_coeff: f64,
    pub added_mass_coeff: f64,
}

impl Default for FoilSection {
    fn default() -> Self {
        let f = FoilConfig::default();
        Self {
            chord_mm: f.tail_chord / MM,
            span_mm: f.tail_span / MM,
            inertia_kgm2: f.tail_inertia,
            pitch_axis_offset_mm: f.pitch_axis_offset / MM,
            fluid_density_kgm3: f.fluid_density,
            normal_force_slope_per_rad: f.normal_force_slope,
            stall_model: f.stall_model,
            profile_drag_coeff: f.profile_drag_coeff,
            added_mass_coeff: f.added_mass_coeff,
        }
    }
}

impl FoilSection {
    pub fn to_foil(&self) -> Result<FoilConfig> {
        let foil = FoilConfig {
            tail_chord: self.chord_mm * MM,
            tail_span: self.span_mm * MM,
            tail_inertia: self.inertia_kgm2,
            pitch_axis_offset: self.pitch_axis_offset_mm * MM,
            fluid_density: self.fluid_density_kgm3,
            normal_force_slope: self.normal_force_slope_per_rad,
            stall_model: self.stall_model,
            profile_drag_coeff: self.profile_drag_coeff,
            added_mass_coeff: self.added_mass_coeff,
        };
        foil.validate().map_err(|e| e.context("foil"))?;
        Ok(foil)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub heave_freq_grid_hz: Grid,
    pub heave_amp_pp_mm: f64,
    pub freestream_mps: f64,
    pub cycles: usize,
    pub warmup_cycles: usize,
    /// Fixed RK4 steps per heave cycle; absent picks the step automatically.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps_per_cycle: Option<usize>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            heave_freq_grid_hz: Grid::range(0.5, 2.0, 0.25).expect("static grid"),
            heave_amp_pp_mm: 80.0,
            freestream_mps: 0.2,
            cycles: 5,
            warmup_cycles: 10,
            steps_per_cycle: None,
        }
    }
}

impl SweepSection {
    pub fn kinematics(&self, heave_freq: f64) -> Result<KinematicsSpec> {
        KinematicsSpec::new(heave_freq, self.heave_amp_pp_mm * MM, self.freestream_mps)
            .map_err(|e| Error::Config(format!("sweep kinematics: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FreeSwimSection {
    pub heave_freq_hz: f64,
    pub heave_amp_pp_mm: f64,
    pub virtual_mass_kg: f64,
    pub duration_s: f64,
    pub body_drag_coeff: f64,
    /// Body drag reference area; absent uses the tail planform.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub body_area_mm2: Option<f64>,
    pub designs: Vec<String>,
}

impl Default for FreeSwimSection {
    fn default() -> Self {
        let p = FreeSwimParams::default();
        Self {
            heave_freq_hz: 2.0,
            heave_amp_pp_mm: 80.0,
            virtual_mass_kg: p.virtual_mass,
            duration_s: p.duration,
            body_drag_coeff: p.body_drag_coeff,
            body_area_mm2: None,
            designs: vec!["baseline".into(), "c".into()],
        }
    }
}

impl FreeSwimSection {
    pub fn params(&self) -> FreeSwimParams {
        FreeSwimParams {
            virtual_mass: self.virtual_mass_kg,
            body_drag_coeff: self.body_drag_coeff,
            body_area: self.body_area_mm2.map(|a| a * MM * MM),
            duration: self.duration_s,
        }
    }

    /// The carriage starts in still water; the freestream entry only feeds the
    /// validity check and plays no part in the dynamics.
    pub fn kinematics(&self, sweep: &SweepSection) -> Result<KinematicsSpec> {
        KinematicsSpec::new(self.heave_freq_hz, self.heave_amp_pp_mm * MM, sweep.freestream_mps)
            .map_err(|e| Error::Config(format!("free-swim kinematics: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub layup: LayupSection,
    pub designs: Vec<Design>,
    pub bender: BenderSection,
    pub prony: PronySection,
    pub foil: FoilSection,
    pub sweep: SweepSection,
    pub freeswim: FreeSwimSection,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            schema_version: CONFIG_SCHEMA_VERSION,
            seed: 0,
            output_dir: PathBuf::from("runs"),
            layup: LayupSection::default(),
            designs: default_designs(),
            bender: BenderSection::default(),
            prony: PronySection::default(),
            foil: FoilSection::default(),
            sweep: SweepSection::default(),
            freeswim: FreeSwimSection::default(),
        }
    }
}

impl ProtocolConfig {
    /// Parses config text, applies `section.key=value` overrides, then validates.
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let user: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(format!("config parse: {}", e.message())))?;
        // overrides address defaults the file leaves out, e.g. a design entry
        let mut table = match toml::Value::try_from(ProtocolConfig::default()) {
            Ok(toml::Value::Table(t)) => t,
            _ => unreachable!("config serializes to a table"),
        };
        merge_tables(&mut table, user);
        for ov in overrides {
            apply_override(&mut table, ov)?;
        }
        let cfg: ProtocolConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, overrides).map_err(|e| e.context(path.display().to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {CONFIG_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let map_cfg = |e: Error| Error::Config(e.to_string());
        self.layup.to_layup().map_err(map_cfg)?;
        self.foil.to_foil().map_err(map_cfg)?;
        if self.designs.is_empty() {
            return Err(Error::Config("at least one design is required".into()));
        }
        for (i, d) in self.designs.iter().enumerate() {
            if d.name.is_empty() {
                return Err(Error::Config("design names must be non-empty".into()));
            }
            if !(0.0..=100.0).contains(&d.coverage_pct) {
                return Err(Error::Config(format!(
                    "design `{}` coverage {}% is outside 0..100",
                    d.name, d.coverage_pct
                )));
            }
            if self.designs[..i].iter().any(|o| o.name == d.name) {
                return Err(Error::Config(format!("duplicate design `{}`", d.name)));
            }
        }

        let b = &self.bender;
        if b.freq_grid_hz.min() < 0.0 {
            return Err(Error::Config("bender frequencies must be >= 0".into()));
        }
        if !(b.amplitude_deg > 0.0 && b.amplitude_deg.is_finite()) {
            return Err(Error::Config("bender amplitude must be > 0".into()));
        }
        if !(b.sample_rate_hz > 0.0 && b.sample_rate_hz.is_finite()) {
            return Err(Error::Config("bender sample rate must be > 0".into()));
        }
        if b.cycles < crate::signal::MIN_LOCKIN_CYCLES {
            return Err(Error::Config(format!(
                "bender needs at least {} cycles",
                crate::signal::MIN_LOCKIN_CYCLES
            )));
        }
        if b.repeats == 0 {
            return Err(Error::Config("bender repeats must be >= 1".into()));
        }
        if matches!(b.noise_snr_db, Some(s) if !s.is_finite()) {
            return Err(Error::Config("bender noise SNR must be finite".into()));
        }

        if self.prony.branches == 0 {
            return Err(Error::Config("prony branches must be >= 1".into()));
        }
        if self.prony.fit_grid_hz.min() <= 0.0 {
            return Err(Error::Config("prony fit frequencies must be > 0".into()));
        }

        let s = &self.sweep;
        if s.heave_freq_grid_hz.min() <= 0.0 {
            return Err(Error::Config("sweep heave frequencies must be > 0".into()));
        }
        s.kinematics(s.heave_freq_grid_hz.min())?;
        if s.cycles < crate::signal::MIN_LOCKIN_CYCLES {
            return Err(Error::Config(format!(
                "sweep needs at least {} recorded cycles",
                crate::signal::MIN_LOCKIN_CYCLES
            )));
        }
        if s.steps_per_cycle == Some(0) {
            return Err(Error::Config("steps_per_cycle must be >= 1".into()));
        }

        let f = &self.freeswim;
        f.kinematics(s)?;
        f.params().validate().map_err(map_cfg)?;
        for name in &f.designs {
            self.design(name)?;
        }
        Ok(())
    }

    pub fn design(&self, name: &str) -> Result<&Design> {
        self.designs
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| Error::UnknownDesign(name.to_string()))
    }
}

/// Applies one `section.key=value` override to a parsed config table.
///
/// Array-of-table sections are addressed by element name, as in
/// `designs.c.coverage_pct=50`. The value is read as a TOML literal and
/// falls back to a plain string (so grid shorthand needs no quoting).
pub fn apply_override(table: &mut toml::Table, text: &str) -> Result<()> {
    let (path, raw) = text
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{text}` is not key=value")))?;
    let path = path.trim();
    let keys: Vec<&str> = path.split('.').map(str::trim).collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::Config(format!("override key `{path}` is malformed")));
    }
    check_known(&keys).map_err(|e| Error::Config(format!("override `{path}`: {e}")))?;
    let value = parse_value(raw.trim());

    let mut node = table;
    let mut i = 0;
    while i + 1 < keys.len() {
        let key = keys[i];
        let entry = node
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = match entry {
            toml::Value::Table(t) => t,
            toml::Value::Array(items) => {
                i += 1;
                let name = keys[i];
                let found = items.iter_mut().find_map(|item| match item {
                    toml::Value::Table(t) if t.get("name").and_then(|n| n.as_str()) == Some(name) => {
                        Some(t)
                    }
                    _ => None,
                });
                found.ok_or_else(|| Error::UnknownDesign(name.to_string()))?
            }
            _ => {
                return Err(Error::Config(format!(
                    "override `{path}`: `{key}` is not a section"
                )))
            }
        };
        i += 1;
    }
    if i + 1 != keys.len() {
        return Err(Error::Config(format!("override `{path}` names a section, not a key")));
    }
    node.insert(keys[i].to_string(), value);
    Ok(())
}

/// Tables merge key by key; any other value, arrays included, replaces the default.
fn merge_tables(base: &mut toml::Table, over: toml::Table) {
    for (key, value) in over {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge_tables(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Rejects override paths that do not name a config key.
fn check_known(keys: &[&str]) -> std::result::Result<(), String> {
    let template = toml::Value::try_from(schema_template()).expect("template serializes");
    let mut node = &template;
    let mut i = 0;
    while i < keys.len() {
        node = match node {
            toml::Value::Table(t) => t
                .get(keys[i])
                .ok_or_else(|| format!("unknown key `{}`", keys[..=i].join(".")))?,
            toml::Value::Array(items) if items.iter().all(|v| v.is_table()) && !items.is_empty() => {
                // keys[i] is an element name; descend into the element schema
                i += 1;
                if i == keys.len() {
                    return Err("names an element, not a key".into());
                }
                items[0]
                    .as_table()
                    .and_then(|t| t.get(keys[i]))
                    .ok_or_else(|| format!("unknown key `{}`", keys[i]))?
            }
            _ => return Err(format!("`{}` is not a section", keys[..i].join("."))),
        };
        i += 1;
    }
    if node.is_table() {
        return Err("names a section, not a key".into());
    }
    Ok(())
}

/// Default config with every optional key populated, used as the key schema.
pub fn schema_template() -> ProtocolConfig {
    let mut cfg = ProtocolConfig::default();
    cfg.bender.noise_snr_db = Some(20.0);
    cfg.sweep.steps_per_cycle = Some(1000);
    cfg.freeswim.body_area_mm2 = Some(1.0);
    cfg
}
