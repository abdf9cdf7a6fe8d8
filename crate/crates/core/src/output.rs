//! CSV tables with self-describing header blocks, and plain SVG line charts.

use std::fmt::Write as _;
use std::path::Path;

use crate::rates::RateSet;
use crate::{Error, Result};

/// Scientific notation with nine significant digits.
pub fn num(x: f64) -> String {
    // Adding +0 folds -0 into 0.
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{:.8e}", x + 0.0)
    }
}

/// A table with `#`-prefixed header lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Csv {
    pub header: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(columns: &[&str]) -> Self {
        Csv {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn note(&mut self, line: impl Into<String>) -> &mut Self {
        self.header.push(line.into());
        self
    }

    /// `key = value` header line with the value in table notation.
    pub fn param(&mut self, key: &str, value: f64) -> &mut Self {
        self.note(format!("{key} = {}", num(value)))
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&x| num(x)).collect());
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for h in &self.header {
            let _ = writeln!(s, "# {h}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }
}

/// Header lines for every rate in a rate set.
pub fn rates_header(csv: &mut Csv, r: &RateSet) {
    for (k, v) in [
        ("A21 [s^-1]", r.a21),
        ("A31 [s^-1]", r.a31),
        ("w23 [s^-1]", r.w23),
        ("w32 [s^-1]", r.w32),
        ("Gamma2 [s^-1]", r.gamma2),
        ("Gamma3 [s^-1]", r.gamma3),
        ("Gamma21 [s^-1]", r.gamma21),
        ("Gamma31 [s^-1]", r.gamma31),
        ("Gamma32 [s^-1]", r.gamma32),
    ] {
        csv.param(k, v);
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn ensure_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One curve of a chart; non-finite points break the line.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Linear,
    Log,
}

#[derive(Debug, Clone)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_axis: Axis,
    pub y_axis: Axis,
    pub series: Vec<Series>,
}

const W: f64 = 720.0;
const H: f64 = 480.0;
const MARGIN: (f64, f64, f64, f64) = (80.0, 30.0, 40.0, 60.0); // left, right, top, bottom
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn ticks(lo: f64, hi: f64, axis: Axis) -> Vec<f64> {
    match axis {
        Axis::Log => {
            let (a, b) = (lo.log10().floor() as i32, hi.log10().ceil() as i32);
            (a..=b)
                .map(|e| 10f64.powi(e))
                .filter(|t| *t >= lo && *t <= hi)
                .collect()
        }
        Axis::Linear => {
            let span = hi - lo;
            let raw = span / 6.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0]
                .into_iter()
                .map(|m| m * mag)
                .find(|s| *s >= raw)
                .unwrap_or(10.0 * mag);
            let start = (lo / step).ceil() as i64;
            let end = (hi / step).floor() as i64;
            (start..=end).map(|k| k as f64 * step).collect()
        }
    }
}

impl Chart {
    pub fn render_svg(&self) -> String {
        let tf = |v: f64, axis: Axis| if axis == Axis::Log { v.log10() } else { v };
        let usable = |p: &(f64, f64)| {
            p.0.is_finite()
                && p.1.is_finite()
                && (self.x_axis == Axis::Linear || p.0 > 0.0)
                && (self.y_axis == Axis::Linear || p.1 > 0.0)
        };
        let pts: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().copied())
            .filter(usable)
            .collect();
        let (mut x0, mut x1, mut y0, mut y1) = pts.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
        );
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 <= x0 {
            x1 = x0 + x0.abs().max(1.0);
        }
        if y1 <= y0 {
            y1 = y0 + y0.abs().max(1.0);
        }
        if self.y_axis == Axis::Linear {
            let pad = 0.05 * (y1 - y0);
            y0 -= pad;
            y1 += pad;
        }
        let (l, r, t, b) = MARGIN;
        let (pw, ph) = (W - l - r, H - t - b);
        let (tx0, tx1, ty0, ty1) = (
            tf(x0, self.x_axis),
            tf(x1, self.x_axis),
            tf(y0, self.y_axis),
            tf(y1, self.y_axis),
        );
        let sx = |x: f64| l + (tf(x, self.x_axis) - tx0) / (tx1 - tx0) * pw;
        let sy = |y: f64| t + ph - (tf(y, self.y_axis) - ty0) / (ty1 - ty0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            W / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{l}" y="{t}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for v in ticks(x0, x1, self.x_axis) {
            let x = sx(v);
            let _ = writeln!(
                s,
                r##"<line x1="{x:.2}" y1="{t}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/>"##,
                t + ph
            );
            let _ = writeln!(
                s,
                r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                t + ph + 16.0,
                tick_label(v)
            );
        }
        for v in ticks(y0, y1, self.y_axis) {
            let y = sy(v);
            let _ = writeln!(
                s,
                r##"<line x1="{l}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
                l + pw
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                l - 6.0,
                y + 4.0,
                tick_label(v)
            );
        }
        if self.y_axis == Axis::Linear && y0 < 0.0 && y1 > 0.0 {
            let y = sy(0.0);
            let _ = writeln!(
                s,
                r#"<line x1="{l}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black" stroke-dasharray="4 3"/>"#,
                l + pw
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            l + pw / 2.0,
            H - 18.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            t + ph / 2.0,
            t + ph / 2.0,
            escape(&self.y_label)
        );
        for (i, series) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let mut d = String::new();
            let mut pen_up = true;
            for p in &series.points {
                if !usable(p) {
                    pen_up = true;
                    continue;
                }
                let _ = write!(d, "{}{:.2},{:.2} ", if pen_up { "M" } else { "L" }, sx(p.0), sy(p.1));
                pen_up = false;
            }
            let _ = writeln!(
                s,
                r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                d.trim_end()
            );
            let ly = t + 16.0 + 16.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
                l + pw - 150.0,
                l + pw - 125.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                l + pw - 120.0,
                ly + 4.0,
                escape(&series.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}
