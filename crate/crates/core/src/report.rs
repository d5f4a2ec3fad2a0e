//! Self-contained SVG charts of sweep results, each with its backing CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::sweep::SweepTable;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("sweep table is empty")]
    EmptyTable,
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    /// Bank final multiple against rate, one curve per (portfolio, MOC).
    BankMultiple,
    /// Underwriter gross return against rate, one curve per portfolio.
    UnderwriterReturn,
}

impl ReportKind {
    fn reference(&self) -> f64 {
        match self {
            ReportKind::BankMultiple => 1.0,
            ReportKind::UnderwriterReturn => 0.0,
        }
    }

    fn title(&self) -> &'static str {
        match self {
            ReportKind::BankMultiple => "Venture bank return multiple vs LIBOR (break-even 1.0)",
            ReportKind::UnderwriterReturn => "DIN underwriter gross return vs LIBOR (break-even 0)",
        }
    }

    fn y_label(&self) -> &'static str {
        match self {
            ReportKind::BankMultiple => "final multiple",
            ReportKind::UnderwriterReturn => "gross return",
        }
    }

    fn value_column(&self) -> &'static str {
        match self {
            ReportKind::BankMultiple => "bank_multiple",
            ReportKind::UnderwriterReturn => "underwriter_return",
        }
    }
}

struct Series {
    name: String,
    points: Vec<(f64, f64)>,
}

fn collect_series(table: &SweepTable, kind: ReportKind) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for ((label, moc), rows) in table.curves() {
        let name = match kind {
            ReportKind::BankMultiple => format!("{label} @ {moc}X"),
            ReportKind::UnderwriterReturn => {
                // Underwriter returns do not depend on leverage.
                if out.iter().any(|s| s.name == label) {
                    continue;
                }
                label.clone()
            }
        };
        let points = rows
            .iter()
            .map(|r| {
                let y = match kind {
                    ReportKind::BankMultiple => r.bank_multiple,
                    ReportKind::UnderwriterReturn => r.underwriter_return,
                };
                (r.libor_pct, y)
            })
            .collect();
        out.push(Series { name, points });
    }
    out
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn nice_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

pub fn render_svg(table: &SweepTable, kind: ReportKind) -> Result<String, ReportError> {
    if table.rows.is_empty() {
        return Err(ReportError::EmptyTable);
    }
    let series = collect_series(table, kind);
    let reference = kind.reference();
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (reference, reference);
    for s in &series {
        for &(x, y) in &s.points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * plot_h;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        kind.title()
    )
    .unwrap();

    // axes and ticks
    writeln!(
        svg,
        r##"<g class="axes" stroke="#333" fill="none"><rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}"/></g>"##
    )
    .unwrap();
    let xs = nice_step(x1 - x0);
    let mut t = (x0 / xs).ceil() * xs;
    while t <= x1 + 1e-9 {
        writeln!(
            svg,
            r##"<text x="{:.2}" y="{:.2}" text-anchor="middle" fill="#333">{}</text>"##,
            sx(t),
            TOP + plot_h + 18.0,
            trim_num(t)
        )
        .unwrap();
        t += xs;
    }
    let ys = nice_step(y1 - y0);
    let mut t = (y0 / ys).ceil() * ys;
    while t <= y1 + 1e-9 {
        writeln!(
            svg,
            r##"<text x="{:.2}" y="{:.2}" text-anchor="end" fill="#333">{}</text>"##,
            LEFT - 6.0,
            sy(t) + 4.0,
            trim_num(t)
        )
        .unwrap();
        t += ys;
    }
    writeln!(
        svg,
        r##"<text x="{:.2}" y="{:.2}" text-anchor="middle" fill="#333">12-month LIBOR (%)</text>"##,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    )
    .unwrap();
    writeln!(
        svg,
        r##"<text x="16" y="{:.2}" text-anchor="middle" fill="#333" transform="rotate(-90 16 {:.2})">{}</text>"##,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        kind.y_label()
    )
    .unwrap();

    writeln!(
        svg,
        r##"<line class="reference" data-y="{reference}" x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#000" stroke-dasharray="6 4"/>"##,
        LEFT + plot_w,
        y = sy(reference)
    )
    .unwrap();

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        writeln!(
            svg,
            r#"<polyline class="curve" data-series="{}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            s.name,
            pts.join(" ")
        )
        .unwrap();
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 14.0;
        writeln!(
            svg,
            r#"<rect x="{lx}" y="{:.2}" width="14" height="4" fill="{color}"/><text x="{}" y="{:.2}">{}</text>"#,
            ly - 2.0,
            lx + 20.0,
            ly + 4.0,
            s.name
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn trim_num(x: f64) -> String {
    let s = format!("{:.3}", if x.abs() < 1e-12 { 0.0 } else { x });
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn backing_csv(table: &SweepTable, kind: ReportKind) -> String {
    let mut out = format!("portfolio,moc,libor_pct,{}\n", kind.value_column());
    for r in &table.rows {
        let v = match kind {
            ReportKind::BankMultiple => r.bank_multiple,
            ReportKind::UnderwriterReturn => r.underwriter_return,
        };
        writeln!(out, "{},{},{},{}", r.portfolio_label, r.moc, r.libor_pct, v).unwrap();
    }
    out
}

/// Writes the SVG to `out` and its data to the same path with a `.csv`
/// extension. Returns both paths.
pub fn emit_report(
    table: &SweepTable,
    kind: ReportKind,
    out: &Path,
) -> Result<(PathBuf, PathBuf), ReportError> {
    let svg = render_svg(table, kind)?;
    let csv_path = out.with_extension("csv");
    let write = |path: &Path, body: &str| {
        fs::write(path, body).map_err(|source| ReportError::Io {
            path: path.to_path_buf(),
            source,
        })
    };
    write(out, &svg)?;
    write(&csv_path, &backing_csv(table, kind))?;
    Ok((out.to_path_buf(), csv_path))
}
