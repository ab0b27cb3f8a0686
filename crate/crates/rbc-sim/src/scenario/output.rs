//! CSV tables and SVG line charts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

use super::sweep::Row;

/// Header of every output table, in order.
pub const COLUMNS: [&str; 12] = [
    "sweep_value",
    "eta_direct",
    "eta_irs",
    "P_o",
    "P_o_2v",
    "P_oc_d",
    "P_oc_i",
    "gamma_opt",
    "P_oc",
    "SNR_dB",
    "SE_bps_hz",
    "status",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Plot,
    Both,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "plot" => Ok(Self::Plot),
            "both" => Ok(Self::Both),
            other => Err(format!("unknown format `{other}` (expected csv, plot or both)")),
        }
    }
}

fn number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::State(format!("CSV encoding failed: {e}"))
}

/// Serializes rows with 17 significant digits; empty cells mean "not
/// applicable".
pub fn render_csv(rows: &[Row]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(COLUMNS).map_err(csv_err)?;
    for row in rows {
        let mut record: Vec<String> = COLUMNS[..COLUMNS.len() - 1]
            .iter()
            .map(|c| row.get(c).map(number).unwrap_or_default())
            .collect();
        record.push(row.status.clone());
        w.write_record(&record).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::State(format!("CSV encoding failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::State(e.to_string()))
}

/// Reads a table written by [`render_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    if header != COLUMNS {
        return Err(Error::State(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_err)?;
        let cell = |i: usize| -> Result<Option<f64>> {
            let s = record.get(i).unwrap_or("");
            if s.is_empty() {
                return Ok(None);
            }
            s.parse()
                .map(Some)
                .map_err(|_| Error::State(format!("bad number `{s}` in column {}", COLUMNS[i])))
        };
        rows.push(Row {
            sweep_value: cell(0)?.unwrap_or(f64::NAN),
            eta_direct: cell(1)?,
            eta_irs: cell(2)?,
            p_o: cell(3)?,
            p_o_2v: cell(4)?,
            p_oc_d: cell(5)?,
            p_oc_i: cell(6)?,
            gamma_opt: cell(7)?,
            p_oc: cell(8)?,
            snr_db: cell(9)?,
            se_bps_hz: cell(10)?,
            status: record.get(11).unwrap_or("").to_string(),
        });
    }
    Ok(rows)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 {
        "0".into()
    } else if (1e-2..1e4).contains(&a) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn bounds(vals: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        return None;
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(1e-300) {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.05 };
        Some((lo - pad, hi + pad))
    } else {
        Some((lo, hi))
    }
}

/// Line chart of `column` against the sweep value. `None` when the column
/// has no finite entries.
pub fn plot_svg(rows: &[Row], x_label: &str, column: &str) -> Option<String> {
    let pts: Vec<Option<(f64, f64)>> = rows
        .iter()
        .map(|r| match r.get(column) {
            Some(y) if y.is_finite() && r.sweep_value.is_finite() => Some((r.sweep_value, y)),
            _ => None,
        })
        .collect();
    let (x0, x1) = bounds(pts.iter().flatten().map(|p| p.0))?;
    let (y0, y1) = bounds(pts.iter().flatten().map(|p| p.1))?;

    let (w, h) = (640.0, 420.0);
    let (ml, mr, mt, mb) = (80.0, 20.0, 40.0, 60.0);
    let pw = w - ml - mr;
    let ph = h - mt - mb;
    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| mt + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">
<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>
<text x="{tx}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{title}</text>
<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#,
        tx = w / 2.0,
        title = escape(&format!("{column} vs {x_label}")),
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r##"<line x1="{px:.2}" y1="{b:.2}" x2="{px:.2}" y2="{b2:.2}" stroke="black"/>
<text x="{px:.2}" y="{tl:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{xl}</text>
<line x1="{ml:.2}" y1="{py:.2}" x2="{l2:.2}" y2="{py:.2}" stroke="black"/>
<line x1="{ml:.2}" y1="{py:.2}" x2="{r:.2}" y2="{py:.2}" stroke="#dddddd"/>
<text x="{yl_x:.2}" y="{py4:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{yl}</text>"##,
            b = mt + ph,
            b2 = mt + ph + 5.0,
            tl = mt + ph + 18.0,
            xl = escape(&tick_label(xv)),
            l2 = ml - 5.0,
            r = ml + pw,
            yl_x = ml - 8.0,
            py4 = py + 4.0,
            yl = escape(&tick_label(yv)),
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{cx}" y="{by}" text-anchor="middle" font-family="sans-serif" font-size="13">{xl}</text>
<text x="18" y="{cy}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {cy})">{yl}</text>"#,
        cx = ml + pw / 2.0,
        by = h - 15.0,
        cy = mt + ph / 2.0,
        xl = escape(x_label),
        yl = escape(column),
    );
    for run in pts.split(|p| p.is_none()) {
        let coords: Vec<String> = run
            .iter()
            .flatten()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        if coords.is_empty() {
            continue;
        }
        let _ = writeln!(
            s,
            r##"<polyline fill="none" stroke="#1f5fa8" stroke-width="2" points="{}"/>"##,
            coords.join(" ")
        );
        for c in &coords {
            let (x, y) = c.split_once(',').unwrap_or(("0", "0"));
            let _ = writeln!(s, r##"<circle cx="{x}" cy="{y}" r="3" fill="#1f5fa8"/>"##);
        }
    }
    s.push_str("</svg>\n");
    Some(s)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `<stem>.csv` and/or one `<stem>_<column>.svg` per column into
/// `dir`. Returns the files written.
pub fn write_outputs(
    rows: &[Row],
    x_label: &str,
    columns: &[String],
    dir: &Path,
    stem: &str,
    format: OutputFormat,
) -> Result<Vec<PathBuf>> {
    if rows.is_empty() {
        return Err(Error::State("nothing to write: the table is empty".into()));
    }
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
        let path = dir.join(format!("{stem}.csv"));
        write_file(&path, &render_csv(rows)?)?;
        written.push(path);
    }
    if matches!(format, OutputFormat::Plot | OutputFormat::Both) {
        let all: Vec<String>;
        let cols = if columns.is_empty() {
            all = COLUMNS[1..COLUMNS.len() - 1]
                .iter()
                .map(|c| c.to_string())
                .collect();
            &all
        } else {
            columns
        };
        for c in cols {
            if let Some(svg) = plot_svg(rows, x_label, c) {
                let path = dir.join(format!("{stem}_{c}.svg"));
                write_file(&path, &svg)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}
