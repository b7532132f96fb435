//! Plot-ready output: for each design a tidy CSV and a standalone SVG chart,
//! named `fig_<kind>_<design>.csv` / `.svg`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::bender::ImpedanceTable;
use super::io::create_file;
use super::sweep::SweepTable;
use crate::error::{Error, Result};
use crate::foil::{ConstrainedTrace, FreeSwimTrace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    Impedance,
    Thrust,
    Efficiency,
    Fractions,
    Trace,
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::Impedance => "impedance",
            PlotKind::Thrust => "thrust",
            PlotKind::Efficiency => "efficiency",
            PlotKind::Fractions => "fractions",
            PlotKind::Trace => "trace",
        }
    }
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "impedance" => PlotKind::Impedance,
            "thrust" => PlotKind::Thrust,
            "efficiency" => PlotKind::Efficiency,
            "fractions" => PlotKind::Fractions,
            "trace" => PlotKind::Trace,
            _ => return Err(Error::Config(format!("unknown plot kind `{s}`"))),
        })
    }
}

/// Data a figure can be drawn from.
#[derive(Clone, Copy, Debug)]
pub enum PlotSource<'a> {
    Impedance(&'a ImpedanceTable),
    Sweep(&'a SweepTable),
    /// A constrained record, folded on the heave period.
    Constrained { design: &'a str, trace: &'a ConstrainedTrace },
    FreeSwim { design: &'a str, trace: &'a FreeSwimTrace },
}

/// One figure: named columns, the first being the abscissa. Empty cells are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotData {
    pub design: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
    /// Draw the y columns as stacked areas rather than lines.
    pub stacked: bool,
    /// Rows sharing this group value form one polyline (used for folded cycles).
    pub group_column: Option<usize>,
}

fn by_design<'a, R: 'a>(
    designs: Vec<&'a str>,
    rows_for: impl Fn(&'a str) -> Vec<&'a R>,
    columns: Vec<&'static str>,
    stacked: bool,
    row: impl Fn(&R) -> Vec<Option<f64>>,
) -> Vec<PlotData> {
    designs
        .into_iter()
        .map(|d| PlotData {
            design: d.to_string(),
            columns: columns.clone(),
            rows: rows_for(d).into_iter().map(&row).collect(),
            stacked,
            group_column: None,
        })
        .collect()
}

/// Cycle-folded thrust and heave: one row per recorded sample with its cycle
/// index and phase in [0, 1). The closing sample is dropped.
pub fn fold_constrained(trace: &ConstrainedTrace) -> Vec<Vec<Option<f64>>> {
    let per = trace.plan.steps_per_cycle / trace.plan.stride;
    let cycles = trace.len().saturating_sub(1) / per;
    let mut rows = Vec::with_capacity(cycles * per);
    for c in 0..cycles {
        for i in 0..per {
            let k = c * per + i;
            rows.push(vec![
                Some(i as f64 / per as f64),
                Some(c as f64),
                Some(trace.heave[k]),
                Some(trace.thrust[k]),
            ]);
        }
    }
    rows
}

pub fn plot_data(source: PlotSource<'_>, kind: PlotKind) -> Result<Vec<PlotData>> {
    let unsupported = || {
        Error::Config(format!(
            "plot kind `{}` is not available for this table",
            kind.name()
        ))
    };
    let data = match (source, kind) {
        (PlotSource::Impedance(t), PlotKind::Impedance) => by_design(
            t.designs(),
            |d| t.rows_for(d).collect(),
            vec!["freq_hz", "k_storage", "k_loss"],
            false,
            |r| vec![Some(r.freq_hz), Some(r.stiffness.storage), Some(r.stiffness.loss)],
        ),
        (PlotSource::Impedance(t), PlotKind::Fractions) => by_design(
            t.designs(),
            |d| t.rows_for(d).collect(),
            vec!["freq_hz", "f_elastic", "f_dissipative"],
            true,
            |r| {
                vec![
                    Some(r.freq_hz),
                    r.fractions.map(|f| f.elastic),
                    r.fractions.map(|f| f.dissipative),
                ]
            },
        ),
        (PlotSource::Sweep(t), PlotKind::Thrust) => by_design(
            t.designs(),
            |d| t.rows_for(d).collect(),
            vec!["strouhal", "mean_thrust_n"],
            false,
            |r| vec![Some(r.strouhal), Some(r.metrics.mean_thrust)],
        ),
        (PlotSource::Sweep(t), PlotKind::Efficiency) => by_design(
            t.designs(),
            |d| t.rows_for(d).collect(),
            vec!["strouhal", "efficiency"],
            false,
            |r| vec![Some(r.strouhal), r.metrics.efficiency],
        ),
        (PlotSource::Sweep(t), PlotKind::Fractions) => by_design(
            t.designs(),
            |d| t.rows_for(d).collect(),
            vec!["strouhal", "f_elastic", "f_dissipative"],
            true,
            |r| {
                vec![
                    Some(r.strouhal),
                    r.metrics.fractions.map(|f| f.elastic),
                    r.metrics.fractions.map(|f| f.dissipative),
                ]
            },
        ),
        (PlotSource::Constrained { design, trace }, PlotKind::Trace) => vec![PlotData {
            design: design.to_string(),
            columns: vec!["phase", "cycle", "heave_m", "thrust_n"],
            rows: fold_constrained(trace),
            stacked: false,
            group_column: Some(1),
        }],
        (PlotSource::FreeSwim { design, trace }, PlotKind::Trace) => vec![PlotData {
            design: design.to_string(),
            columns: vec!["time_s", "x_m", "u_cycavg_mps", "a_cycavg_mps2"],
            rows: (0..trace.len())
                .map(|i| {
                    vec![
                        Some(trace.time[i]),
                        Some(trace.position[i]),
                        Some(trace.velocity_cycavg[i]),
                        Some(trace.accel_cycavg[i]),
                    ]
                })
                .collect(),
            stacked: false,
            group_column: None,
        }],
        _ => return Err(unsupported()),
    };
    if data.is_empty() || data.iter().any(|d| d.rows.is_empty()) {
        return Err(Error::Config(format!("nothing to plot for `{}`", kind.name())));
    }
    Ok(data)
}

/// Writes the CSV/SVG pair of every figure into `dir` and returns the paths written.
pub fn emit_plot_data(source: PlotSource<'_>, kind: PlotKind, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for fig in plot_data(source, kind)? {
        let stem = format!("fig_{}_{}", kind.name(), sanitize(&fig.design));
        let csv_path = dir.join(format!("{stem}.csv"));
        write_plot_csv(create_file(&csv_path)?, &fig)?;
        written.push(csv_path);
        let svg_path = dir.join(format!("{stem}.svg"));
        let svg = render_svg(&fig, &format!("{} ({})", kind.name(), fig.design));
        create_file(&svg_path)?
            .write_all(svg.as_bytes())
            .map_err(|e| Error::io(&svg_path, e))?;
        written.push(svg_path);
    }
    Ok(written)
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

pub fn write_plot_csv<W: Write>(out: W, fig: &PlotData) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&fig.columns)?;
    for row in &fig.rows {
        w.write_record(row.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()))?;
    }
    w.flush().map_err(|e| Error::io("<plot csv>", e))?;
    Ok(())
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite()) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return Self { lo: 0.0, hi: 1.0 };
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            let pad = lo.abs().max(1.0) * 0.5;
            return Self { lo: lo - pad, hi: hi + pad };
        }
        Self { lo, hi }
    }

    fn map(&self, v: f64, from: f64, to: f64) -> f64 {
        from + (v - self.lo) / (self.hi - self.lo) * (to - from)
    }
}

/// Minimal line (or stacked area) chart with axes, tick labels and legend.
pub fn render_svg(fig: &PlotData, title: &str) -> String {
    let x_col = 0;
    let y_cols: Vec<usize> = (1..fig.columns.len())
        .filter(|&c| Some(c) != fig.group_column)
        .collect();
    let stacked_top = |row: &[Option<f64>], upto: usize| -> Option<f64> {
        y_cols[..=upto].iter().map(|&c| row[c]).sum::<Option<f64>>()
    };
    let xs = Axis::new(fig.rows.iter().filter_map(|r| r[x_col]));
    let ys = if fig.stacked {
        let mut a = Axis::new(
            fig.rows
                .iter()
                .flat_map(|r| (0..y_cols.len()).filter_map(move |k| stacked_top(r, k)))
                .chain(std::iter::once(0.0)),
        );
        a.lo = a.lo.min(0.0);
        a
    } else {
        Axis::new(fig.rows.iter().flat_map(|r| y_cols.iter().filter_map(move |&c| r[c])))
    };
    let px = |x: f64| xs.map(x, MARGIN, WIDTH - MARGIN);
    let py = |y: f64| ys.map(y, HEIGHT - MARGIN, MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    for i in 0..=4 {
        let fx = xs.lo + (xs.hi - xs.lo) * i as f64 / 4.0;
        let fy = ys.lo + (ys.hi - ys.lo) * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            px(fx),
            HEIGHT - MARGIN + 16.0,
            tick(fx)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            MARGIN - 6.0,
            py(fy) + 4.0,
            tick(fy)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        escape(fig.columns[x_col])
    );

    let groups: Vec<Vec<&Vec<Option<f64>>>> = match fig.group_column {
        None => vec![fig.rows.iter().collect()],
        Some(g) => {
            let mut out: Vec<Vec<&Vec<Option<f64>>>> = Vec::new();
            let mut last = None;
            for r in &fig.rows {
                if r[g] != last || out.is_empty() {
                    out.push(Vec::new());
                    last = r[g];
                }
                out.last_mut().expect("pushed").push(r);
            }
            out
        }
    };
    for (k, &c) in y_cols.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        for rows in &groups {
            let top: Vec<(f64, f64)> = rows
                .iter()
                .filter_map(|r| {
                    let y = if fig.stacked { stacked_top(r, k) } else { r[c] };
                    Some((r[x_col]?, y?))
                })
                .collect();
            if top.is_empty() {
                continue;
            }
            let pts: Vec<String> = top.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            if fig.stacked {
                let base: Vec<String> = rows
                    .iter()
                    .rev()
                    .filter_map(|r| {
                        let y = if k == 0 { Some(0.0) } else { stacked_top(r, k - 1) };
                        Some(format!("{:.2},{:.2}", px(r[x_col]?), py(y?)))
                    })
                    .collect();
                let _ = writeln!(
                    s,
                    r#"<polygon points="{} {}" fill="{color}" fill-opacity="0.6" stroke="none"/>"#,
                    pts.join(" "),
                    base.join(" ")
                );
            } else {
                let _ = writeln!(
                    s,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                    pts.join(" ")
                );
            }
        }
        let ly = MARGIN + 14.0 * k as f64 + 10.0;
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="3"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            WIDTH - MARGIN - 110.0,
            WIDTH - MARGIN - 95.0,
            WIDTH - MARGIN - 90.0,
            ly + 4.0,
            escape(fig.columns[c])
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-2..1e4).contains(&a) {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
