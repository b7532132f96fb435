//! `cldsim` command line front end.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use cldsim::harness::io::{
    layup_table, open_file, read_signal_csv, write_extract_csv, write_impedance_csv, write_layup_csv,
    write_swim_metrics_csv, write_sweep_csv, ExtractRecord, SignalColumns,
};
use cldsim::harness::{
    execute_bender, execute_freeswim, execute_sweep, parse_grid, schema_template, ProtocolConfig, RunDir, SwimRow,
    TOOLKIT_VERSION,
};
use cldsim::signal::{lockin_extract, TimeSeries};
use cldsim::{Error, Result, CONFIG_SCHEMA_VERSION};

#[derive(Parser, Debug)]
#[command(name = "cldsim", about = "Constrained-layer-damped fin modelling and foil propulsion protocols")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Protocol config file (TOML). Defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set sweep.freestream_mps=0.25`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Base directory for run output (default: `output_dir` from the config).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Only data on stdout, nothing on stderr except errors.
    #[arg(short, long, global = true)]
    quiet: bool,
    /// More diagnostics on stderr (repeat for more).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the model stiffness table of the configured layup.
    Layup {
        /// Frequency grid in Hz, `start:stop:step` or a comma list.
        #[arg(long, value_name = "GRID")]
        freq_grid: Option<String>,
        /// Treated fraction of the plate, percent.
        #[arg(long, default_value_t = 100.0, conflicts_with = "design")]
        coverage_pct: f64,
        /// Use the coverage of a configured design.
        #[arg(long)]
        design: Option<String>,
    },
    /// Synthetic bending-rig campaign over every design.
    Bender {
        #[arg(long, value_name = "GRID")]
        freq_grid: Option<String>,
    },
    /// Lock-in stiffness from measured angle and torque records.
    Extract {
        /// `time_s,<value>` angle record, rad.
        #[arg(long, requires = "torque", conflicts_with = "signals")]
        theta: Option<PathBuf>,
        /// `time_s,<value>` torque record, N·m.
        #[arg(long, requires = "theta")]
        torque: Option<PathBuf>,
        /// Combined `time_s,theta_rad,torque_nm` record.
        #[arg(long)]
        signals: Option<PathBuf>,
        /// Drive frequency, Hz.
        #[arg(long)]
        freq: f64,
    },
    /// Constrained-foil Strouhal sweep over every design.
    Sweep {
        /// Heave frequency grid in Hz.
        #[arg(long, value_name = "GRID")]
        freq_grid: Option<String>,
    },
    /// Virtual-mass free-swimming trials.
    Freeswim {
        /// Design to run; repeatable. Defaults to `freeswim.designs`.
        #[arg(long = "design")]
        designs: Vec<String>,
    },
}

fn config_help() -> String {
    let mut text = String::from("Config keys (section.key = default):\n");
    let table = |c: ProtocolConfig| match toml::Value::try_from(c) {
        Ok(toml::Value::Table(t)) => t,
        _ => toml::Table::new(),
    };
    list_keys(&mut text, "", &table(schema_template()), Some(&table(ProtocolConfig::default())));
    text.push_str(
        "\nDesign entries are addressed by name in overrides, e.g. `--set designs.c.coverage_pct=50`.\n\
         Exit codes: 0 ok, 2 usage or config error, 3 numerical failure, 4 I/O failure.",
    );
    text
}

// `defaults` is None below array-of-table entries, where each design is listed by name instead.
fn list_keys(out: &mut String, prefix: &str, schema: &toml::Table, defaults: Option<&toml::Table>) {
    for (k, v) in schema {
        let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        let default = defaults.and_then(|d| d.get(k));
        match v {
            toml::Value::Table(t) => list_keys(out, &path, t, default.and_then(|d| d.as_table())),
            toml::Value::Array(items) if items.first().is_some_and(|i| i.is_table()) => {
                if let Some(t) = items[0].as_table() {
                    list_keys(out, &format!("{path}.<name>"), t, None);
                }
            }
            _ => match (defaults, default) {
                (Some(_), Some(d)) => out.push_str(&format!("  {path} = {d}\n")),
                (Some(_), None) => out.push_str(&format!("  {path}  (optional, unset)\n")),
                (None, _) => out.push_str(&format!("  {path}\n")),
            },
        }
    }
}

fn load_config(common: &Common, extra: &[String]) -> Result<ProtocolConfig> {
    let mut overrides = common.overrides.clone();
    overrides.extend_from_slice(extra);
    match &common.config {
        Some(path) => ProtocolConfig::load(path, &overrides),
        None => ProtocolConfig::from_toml_str("", &overrides),
    }
}

fn grid_override(key: &str, grid: &Option<String>) -> Result<Vec<String>> {
    match grid {
        Some(g) => {
            parse_grid(g)?;
            Ok(vec![format!("{key}=\"{g}\"")])
        }
        None => Ok(Vec::new()),
    }
}

fn stdout_error(e: io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn run_dir(common: &Common, cfg: &ProtocolConfig, command: &str, stamp: &str) -> Result<RunDir> {
    let base = common.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    RunDir::create(&base, command, stamp)
}

fn read_series(path: &Path) -> Result<SignalColumns> {
    read_signal_csv(open_file(path)?).map_err(|e| e.context(path.display().to_string()))
}

fn column_series(cols: &SignalColumns, name: &str, path: &Path) -> Result<TimeSeries> {
    let idx = cols
        .names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::Config(format!("{}: no `{name}` column", path.display())))?;
    cols.series(idx)
}

fn extract(theta: Option<PathBuf>, torque: Option<PathBuf>, signals: Option<PathBuf>, freq: f64) -> Result<ExtractRecord> {
    let (th, tq) = match (theta, torque, signals) {
        (Some(a), Some(b), None) => {
            let (ca, cb) = (read_series(&a)?, read_series(&b)?);
            if ca.names.len() != 1 || cb.names.len() != 1 {
                return Err(Error::Arity("--theta and --torque files take exactly two columns".into()));
            }
            if ca.time != cb.time {
                return Err(Error::Config("angle and torque timestamps differ".into()));
            }
            (ca.series(0)?, cb.series(0)?)
        }
        (None, None, Some(p)) => {
            let c = read_series(&p)?;
            (column_series(&c, "theta_rad", &p)?, column_series(&c, "torque_nm", &p)?)
        }
        _ => return Err(Error::Config("give either --theta and --torque, or --signals".into())),
    };
    let r = lockin_extract(&th, &tq, freq)?;
    Ok(ExtractRecord::new(freq, &r))
}

fn dispatch(cli: Cli) -> Result<()> {
    let common = &cli.common;
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ").to_string();
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Layup {
            freq_grid,
            coverage_pct,
            design,
        } => {
            let cfg = load_config(common, &[])?;
            let grid = match &freq_grid {
                Some(g) => parse_grid(g)?,
                None => cfg.bender.freq_grid_hz.clone(),
            };
            let coverage = match &design {
                Some(name) => cfg.design(name)?.coverage(),
                None if (0.0..=100.0).contains(&coverage_pct) => coverage_pct / 100.0,
                None => return Err(Error::Config(format!("coverage {coverage_pct}% is outside 0..100"))),
            };
            let layup = cfg.layup.to_layup()?.with_coverage(coverage);
            write_layup_csv(&mut out, &layup_table(&layup, grid.points())?)?;
        }
        Command::Extract {
            theta,
            torque,
            signals,
            freq,
        } => {
            let rec = extract(theta, torque, signals, freq)?;
            write_extract_csv(&mut out, &rec)?;
        }
        Command::Bender { freq_grid } => {
            let cfg = load_config(common, &grid_override("bender.freq_grid_hz", &freq_grid)?)?;
            let mut dir = run_dir(common, &cfg, "bender", &stamp)?;
            let table = execute_bender(&cfg, &mut dir)?;
            dir.write_manifest("bender", &stamp, &cfg)?;
            log::info!("wrote {} files to {}", dir.files().len(), dir.path().display());
            write_impedance_csv(&mut out, &table)?;
        }
        Command::Sweep { freq_grid } => {
            let cfg = load_config(common, &grid_override("sweep.heave_freq_grid_hz", &freq_grid)?)?;
            let mut dir = run_dir(common, &cfg, "sweep", &stamp)?;
            let run = execute_sweep(&cfg, &mut dir)?;
            dir.write_manifest("sweep", &stamp, &cfg)?;
            log::info!("wrote {} files to {}", dir.files().len(), dir.path().display());
            write_sweep_csv(&mut out, &run.table)?;
        }
        Command::Freeswim { designs } => {
            let cfg = load_config(common, &[])?;
            let designs = if designs.is_empty() { cfg.freeswim.designs.clone() } else { designs };
            for d in &designs {
                cfg.design(d)?;
            }
            let mut dir = run_dir(common, &cfg, "freeswim", &stamp)?;
            let runs = execute_freeswim(&cfg, &designs, &mut dir)?;
            dir.write_manifest("freeswim", &stamp, &cfg)?;
            log::info!("wrote {} files to {}", dir.files().len(), dir.path().display());
            let rows: Vec<SwimRow> = runs
                .into_iter()
                .map(|r| SwimRow {
                    design: r.design,
                    metrics: r.metrics,
                })
                .collect();
            write_swim_metrics_csv(&mut out, &rows)?;
        }
    }
    out.flush().map_err(stdout_error)
}

fn init_logging(common: &Common) {
    let level = if common.quiet {
        log::LevelFilter::Off
    } else {
        match common.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            2 => log::LevelFilter::Debug,
            _ => log::LevelFilter::Trace,
        }
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
}

fn main() -> ExitCode {
    let version: &'static str = Box::leak(
        format!("{TOOLKIT_VERSION} (config schema {CONFIG_SCHEMA_VERSION})").into_boxed_str(),
    );
    let command = Cli::command().version(version).after_long_help(config_help());
    let cli = match command
        .try_get_matches()
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    init_logging(&cli.common);
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut msg = format!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                if !msg.contains(&s.to_string()) {
                    msg.push_str(&format!("\n  caused by: {s}"));
                }
                src = s.source();
            }
            eprintln!("{msg}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
