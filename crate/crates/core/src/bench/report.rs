//! CSV and SVG output for RMSE reports.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use super::{BenchError, RmseReport, RmseRow, XAxis};

const CSV_HEADER: &str = "method,n,d,rmse";
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Rows as CSV with 17 significant digits.
pub fn write_rmse_csv<W: Write>(rows: &[RmseRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{:.16e}", r.method, r.n, r.d, r.rmse)?;
    }
    Ok(())
}

pub fn read_rmse_csv<R: BufRead>(r: R) -> Result<Vec<RmseRow>, BenchError> {
    let mut rows = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| BenchError::Csv { line: i + 1, message: e.to_string() })?;
        if i == 0 {
            if line.trim() != CSV_HEADER {
                return Err(BenchError::Csv { line: 1, message: format!("expected header '{CSV_HEADER}'") });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| BenchError::Csv { line: i + 1, message };
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 4 {
            return Err(bad(format!("expected 4 fields, found {}", cells.len())));
        }
        rows.push(RmseRow {
            method: cells[0].to_string(),
            n: cells[1].parse().map_err(|e| bad(format!("n: {e}")))?,
            d: cells[2].parse().map_err(|e| bad(format!("d: {e}")))?,
            rmse: cells[3].parse().map_err(|e| bad(format!("rmse: {e}")))?,
        });
    }
    Ok(rows)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn decade_range(values: impl Iterator<Item = f64>) -> (i32, i32) {
    let (lo, hi) = values.filter(|v| *v > 0.0).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0, 1);
    }
    let (lo, hi) = (lo.log10().floor() as i32, hi.log10().ceil() as i32);
    (lo, if hi > lo { hi } else { lo + 1 })
}

/// Self-contained log-log line chart with one polyline per method.
pub fn render_svg(report: &RmseReport) -> String {
    let (w, h) = (760.0, 480.0);
    let (left, right, top, bottom) = (80.0, 600.0, 40.0, 420.0);
    let x_of = |r: &RmseRow| match report.x_axis {
        XAxis::SampleCount => r.n as f64,
        XAxis::Dimension => r.d as f64,
    };
    let (x0, x1) = decade_range(report.rows.iter().map(x_of));
    let (y0, y1) = decade_range(report.rows.iter().map(|r| r.rmse));
    let px = |x: f64| left + (x.log10() - x0 as f64) / (x1 - x0) as f64 * (right - left);
    let py = |y: f64| bottom - (y.log10() - y0 as f64) / (y1 - y0) as f64 * (bottom - top);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">RMSE ({})</text>"#, (left + right) / 2.0, escape(&report.meta.experiment));
    for k in x0..=x1 {
        let x = left + (k - x0) as f64 / (x1 - x0) as f64 * (right - left);
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{top}" x2="{x:.2}" y2="{bottom}" stroke="#ddd"/>"##);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{k}</text>"#, bottom + 18.0);
    }
    for k in y0..=y1 {
        let y = bottom - (k - y0) as f64 / (y1 - y0) as f64 * (bottom - top);
        let _ = writeln!(s, r##"<line x1="{left}" y1="{y:.2}" x2="{right}" y2="{y:.2}" stroke="#ddd"/>"##);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{k}</text>"#, left - 6.0, y + 4.0);
    }
    let _ = writeln!(s, r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#, right - left, bottom - top);
    let x_label = match report.x_axis {
        XAxis::SampleCount => "sample count n",
        XAxis::Dimension => "dimension d",
    };
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#, (left + right) / 2.0, bottom + 44.0);
    let _ = writeln!(
        s,
        r#"<text x="24" y="{0}" text-anchor="middle" transform="rotate(-90 24 {0})">RMSE</text>"#,
        (top + bottom) / 2.0
    );

    let mut methods: Vec<&str> = Vec::new();
    for r in &report.rows {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
    }
    for (i, method) in methods.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts: Vec<(f64, f64)> =
            report.rows_for(method).filter(|r| r.rmse > 0.0).map(|r| (px(x_of(r)), py(r.rmse))).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" data-method="{}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            escape(method),
            coords.join(" ")
        );
        for (x, y) in &pts {
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#);
        }
        let ly = top + 10.0 + 20.0 * i as f64;
        let _ = writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, right + 16.0, right + 40.0);
        let label = match report.fits.get(*method) {
            Some(f) => format!("{} (slope {:.2})", method, f.slope),
            None => method.to_string(),
        };
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, right + 46.0, ly + 4.0, escape(&label));
    }
    s.push_str("</svg>\n");
    s
}

/// Writes the CSV table and the SVG chart. An empty report is rejected
/// before any file is created.
pub fn write_report(report: &RmseReport, csv_path: &Path, svg_path: &Path) -> Result<(), BenchError> {
    if report.rows.is_empty() {
        return Err(BenchError::EmptyReport);
    }
    let mut csv = Vec::new();
    write_rmse_csv(&report.rows, &mut csv).expect("writing to memory");
    fs::write(csv_path, csv).map_err(|source| BenchError::Io { path: csv_path.into(), source })?;
    fs::write(svg_path, render_svg(report)).map_err(|source| BenchError::Io { path: svg_path.into(), source })?;
    Ok(())
}
