//! Standalone SVG line plots of estimator CSVs. Tail tables (`level`,
//! `probability`, `ci_low`, `ci_high`, optional `series`) get one line per
//! series with Wilson error bars; any other table plots its first numeric
//! column against the remaining numeric ones.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn read_csv(path: &Path) -> Result<Csv> {
    let bad = |reason: String| CliError::Csv { path: path.display().to_string(), reason };
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_path(path).map_err(|e| bad(e.to_string()))?;
    let header: Vec<String> = r.headers().map_err(|e| bad(e.to_string()))?.iter().map(str::to_string).collect();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(bad("missing header row".into()));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok(Csv { header, rows })
}

#[derive(Debug, Clone, PartialEq)]
struct Series {
    name: String,
    points: Vec<(f64, f64, Option<(f64, f64)>)>,
}

fn parse_num(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok()
}

fn series_of(csv: &Csv, path: &Path) -> Result<(Vec<Series>, String, String)> {
    let bad = |reason: String| CliError::Csv { path: path.display().to_string(), reason };
    let col = |name: &str| csv.header.iter().position(|h| h == name);
    if let (Some(l), Some(p)) = (col("level"), col("probability")) {
        let (lo, hi, s) = (col("ci_low"), col("ci_high"), col("series"));
        let mut by: BTreeMap<String, Vec<(f64, f64, Option<(f64, f64)>)>> = BTreeMap::new();
        let mut order = Vec::new();
        for (k, row) in csv.rows.iter().enumerate() {
            let num = |c: usize| parse_num(&row[c]).ok_or_else(|| bad(format!("row {}: {:?} is not a number", k + 2, row[c])));
            let ci = match (lo, hi) {
                (Some(a), Some(b)) => Some((num(a)?, num(b)?)),
                _ => None,
            };
            let name = s.map_or(String::new(), |c| row[c].clone());
            if !by.contains_key(&name) {
                order.push(name.clone());
            }
            by.entry(name).or_default().push((num(l)?, num(p)?, ci));
        }
        let series = order.into_iter().map(|n| Series { points: by.remove(&n).unwrap_or_default(), name: n }).collect();
        return Ok((series, "level".into(), "probability".into()));
    }
    // generic: numeric columns only
    let numeric: Vec<usize> = (0..csv.header.len())
        .filter(|&c| csv.rows.iter().all(|r| parse_num(&r[c]).is_some() || r[c] == "nan" || r[c].ends_with("inf")))
        .collect();
    if csv.rows.is_empty() {
        return Ok((Vec::new(), csv.header.first().cloned().unwrap_or_default(), String::new()));
    }
    let Some((&x, ys)) = numeric.split_first() else {
        return Err(bad("no numeric column to plot".into()));
    };
    let series = ys
        .iter()
        .map(|&c| Series {
            name: csv.header[c].clone(),
            points: csv
                .rows
                .iter()
                .filter_map(|r| Some((parse_num(&r[x])?, parse_num(&r[c])?, None)))
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .collect(),
        })
        .collect();
    Ok((series, csv.header[x].clone(), "value".into()))
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let vals: Vec<f64> = values.filter(|v| v.is_finite() && (!log || *v > 0.0)).map(|v| if log { v.log2() } else { v }).collect();
        let (mut lo, mut hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if log {
            (lo, hi) = (lo.floor(), hi.ceil());
        }
        if hi - lo < 1e-12 {
            (lo, hi) = (lo - 0.5, hi + 0.5);
        }
        Self { lo, hi, log }
    }

    fn map(&self, v: f64, a: f64, b: f64) -> Option<f64> {
        let t = if self.log {
            if v <= 0.0 {
                return None;
            }
            v.log2()
        } else {
            v
        };
        Some(a + (t - self.lo) / (self.hi - self.lo) * (b - a))
    }

    /// Tick positions (in axis units) with labels.
    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo as i32, self.hi as i32);
            let stride = ((b - a) / 8).max(1);
            return (a..=b).step_by(stride as usize).map(|k| (2f64.powi(k), format!("2^{k}"))).collect();
        }
        let span = self.hi - self.lo;
        let raw = span / 6.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(mag * 10.0);
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        (first..=last).map(|k| (k as f64 * step, format!("{}", (k as f64 * step * 1e9).round() / 1e9))).collect()
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// The SVG document for one parsed CSV.
pub fn render(csv: &Csv, path: &Path, log_log: bool) -> Result<String> {
    let (series, xlabel, ylabel) = series_of(csv, path)?;
    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let ys = series.iter().flat_map(|s| {
        s.points.iter().flat_map(|p| {
            let mut v = vec![p.1];
            if let Some((a, b)) = p.2 {
                v.push(a);
                v.push(b);
            }
            v
        })
    });
    let ax = Axis::fit(xs, log_log);
    let ay = Axis::fit(ys, log_log);
    let (x0, x1, y0, y1) = (LEFT, W - RIGHT, H - BOTTOM, TOP);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<g class="axes" stroke="black"><line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/></g>"#);
    for (v, label) in ax.ticks() {
        if let Some(px) = ax.map(v, x0, x1) {
            let _ = writeln!(out, r#"<g class="xtick"><line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text></g>"#, y0 + 5.0, y0 + 18.0, esc(&label));
        }
    }
    for (v, label) in ay.ticks() {
        if let Some(py) = ay.map(v, y0, y1) {
            let _ = writeln!(out, r#"<g class="ytick"><line x1="{:.2}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text></g>"#, x0 - 5.0, x0 - 8.0, py + 4.0, esc(&label));
        }
    }
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, H - 12.0, esc(&xlabel));
    let _ = writeln!(out, r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#, (y0 + y1) / 2.0, (y0 + y1) / 2.0, esc(&ylabel));
    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<(f64, f64)> = s.points.iter().filter_map(|p| Some((ax.map(p.0, x0, x1)?, ay.map(p.1, y0, y1)?))).collect();
        if pts.len() > 1 {
            let d: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(out, r#"<polyline class="series" fill="none" stroke="{color}" points="{}"/>"#, d.join(" "));
        }
        for p in &s.points {
            let (Some(px), Some(py)) = (ax.map(p.0, x0, x1), ay.map(p.1, y0, y1)) else { continue };
            if let Some((a, b)) = p.2 {
                if let (Some(pa), Some(pb)) = (ay.map(a.max(f64::MIN_POSITIVE), y0, y1), ay.map(b, y0, y1)) {
                    let _ = writeln!(out, r#"<line class="errorbar" x1="{px:.2}" y1="{pa:.2}" x2="{px:.2}" y2="{pb:.2}" stroke="{color}"/>"#);
                }
            }
            let _ = writeln!(out, r#"<circle class="marker" cx="{px:.2}" cy="{py:.2}" r="3" fill="{color}"/>"#);
        }
        if !s.name.is_empty() {
            let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" fill="{color}">{}</text>"#, x1 - 150.0, y1 + 14.0 * (k as f64 + 1.0), esc(&s.name));
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Writes `<name>.svg` next to every CSV.
pub fn plot_files(paths: &[PathBuf], log_log: bool) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        let csv = read_csv(p)?;
        let svg = render(&csv, p, log_log)?;
        let target = p.with_extension("svg");
        std::fs::write(&target, svg).map_err(|e| CliError::io(&target, e))?;
        out.push(target);
    }
    Ok(out)
}
