//! CSV rows and the SVG plot regenerated from them.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One (label, m, seed) cell of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub config_hash: String,
    pub experiment: String,
    pub label: String,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub n_truncated: bool,
    pub c1: f64,
    pub c5: f64,
    pub c_theta: f64,
    pub c0_prime: f64,
    pub error: f64,
    pub std_error: f64,
    pub bound: f64,
}

pub fn write_rows<W: Write>(writer: W, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    if rows.is_empty() {
        w.write_record([
            "config_hash",
            "experiment",
            "label",
            "seed",
            "m",
            "n",
            "n_truncated",
            "c1",
            "c5",
            "c_theta",
            "c0_prime",
            "error",
            "std_error",
            "bound",
        ])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(reader: R) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_reader(reader);
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn write_csv(path: &Path, rows: &[Row]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_rows(std::io::BufWriter::new(file), rows)
}

pub fn read_csv(path: &Path) -> Result<Vec<Row>> {
    read_rows(std::fs::File::open(path)?)
}

/// Median of a nonempty slice; the mean of the middle pair for even lengths.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Median error per (label, size), sizes ascending within each label.
pub fn medians_by_size(rows: &[Row], size: impl Fn(&Row) -> usize) -> BTreeMap<String, Vec<(usize, f64)>> {
    let mut groups: BTreeMap<String, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for r in rows {
        groups
            .entry(r.label.clone())
            .or_default()
            .entry(size(r))
            .or_default()
            .push(r.error);
    }
    groups
        .into_iter()
        .map(|(label, by_size)| (label, by_size.into_iter().map(|(s, errs)| (s, median(&errs))).collect()))
        .collect()
}

/// The size a row is plotted and fitted against: N for learning sweeps, m otherwise.
pub fn plot_size(row: &Row) -> usize {
    match row.experiment.as_str() {
        "learn_rate" | "noise_rate" => row.n,
        _ => row.m,
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Log-log scatter of every positive error with the per-size medians joined.
pub fn render_svg(rows: &[Row]) -> String {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error > 0.0 && plot_size(r) > 0)
        .map(|r| ((plot_size(r) as f64).log10(), r.error.log10()))
        .collect();
    let title = rows.first().map(|r| r.experiment.as_str()).unwrap_or("empty");
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{title}</text>"#,
        WIDTH / 2.0
    );
    if pts.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let span = |it: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let (lo, hi) = (lo.floor(), hi.ceil());
        if hi > lo {
            (lo, hi)
        } else {
            (lo, lo + 1.0)
        }
    };
    let (x0, x1) = span(&mut pts.iter().map(|p| p.0));
    let (y0, y1) = span(&mut pts.iter().map(|p| p.1));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    for e in (x0 as i64)..=(x1 as i64) {
        let x = sx(e as f64);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="#dddddd"/>"##,
            MARGIN,
            HEIGHT - MARGIN
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">1e{e}</text>"#,
            HEIGHT - MARGIN + 18.0
        );
    }
    for e in (y0 as i64)..=(y1 as i64) {
        let y = sy(e as f64);
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#dddddd"/>"##,
            WIDTH - MARGIN
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="12">1e{e}</text>"#,
            MARGIN - 6.0,
            y + 4.0
        );
    }
    let x_label = if matches!(title, "learn_rate" | "noise_rate") {
        "N"
    } else {
        "m"
    };
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{x_label}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 {})">error</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    let labels: Vec<String> = medians_by_size(rows, plot_size).into_keys().collect();
    for r in rows.iter().filter(|r| r.error > 0.0 && plot_size(r) > 0) {
        let color = COLORS[labels.iter().position(|l| *l == r.label).unwrap_or(0) % COLORS.len()];
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{color}" fill-opacity="0.35"/>"#,
            sx((plot_size(r) as f64).log10()),
            sy(r.error.log10())
        );
    }
    for (i, (label, meds)) in medians_by_size(rows, plot_size).iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = meds
            .iter()
            .filter(|(s, e)| *s > 0 && *e > 0.0)
            .map(|&(s, e)| format!("{:.2},{:.2}", sx((s as f64).log10()), sy(e.log10())))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{color}">{label}</text>"#,
            WIDTH - MARGIN + 4.0,
            MARGIN + 14.0 * (i as f64 + 1.0)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Rewrites `plot.svg` next to `results.csv` from the CSV alone.
pub fn regenerate_svg(csv_path: &Path, svg_path: &Path) -> Result<()> {
    let rows = read_csv(csv_path)?;
    std::fs::write(svg_path, render_svg(&rows))?;
    Ok(())
}
