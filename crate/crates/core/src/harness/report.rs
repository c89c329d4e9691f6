//! CSV output, reload for round-trips, and minimal SVG plots.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{LyapunovSpectrum, ReturnMap};
use crate::error::{OdrcError, Result};

use super::experiments::{ChaosReport, NoiseSweepReport, ParameterSweepReport, TimingReport};
use super::trial::TrialRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub task_s: f64,
    pub seed: u64,
    pub r2: f64,
    pub condition: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub condition: String,
    pub capacity_s: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnMapRow {
    pub segment: String,
    pub m_i: f64,
    pub m_next: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub segment: String,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t_ms: usize,
    pub dim: usize,
    pub output: f64,
    pub target: f64,
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| OdrcError::io(dir, e))
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(parent) = path.parent() {
        ensure_dir(parent)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| OdrcError::io(path, e))
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize()
        .map(|row| row.map_err(OdrcError::from))
        .collect()
}

pub fn curve_rows(report: &TimingReport) -> Vec<CurveRow> {
    report
        .cells
        .iter()
        .map(|c| CurveRow {
            task_s: c.interval_s,
            seed: c.seed,
            r2: c.r2,
            condition: report.condition.clone(),
        })
        .collect()
}

pub fn trace_rows(record: &TrialRecord) -> Vec<TraceRow> {
    let dims = record.dims;
    (0..record.len())
        .flat_map(|t| {
            (0..dims).map(move |d| TraceRow {
                t_ms: t,
                dim: d,
                output: record.output[t * dims + d],
                target: record.target[t * dims + d],
            })
        })
        .collect()
}

pub fn return_map_rows(segment: &str, map: &ReturnMap) -> Vec<ReturnMapRow> {
    map.pairs
        .iter()
        .map(|&(m_i, m_next)| ReturnMapRow {
            segment: segment.to_string(),
            m_i,
            m_next,
        })
        .collect()
}

fn spectrum_row(segment: &str, s: &std::result::Result<LyapunovSpectrum, String>) -> SpectrumRow {
    let e = s
        .as_ref()
        .map_or(vec![f64::NAN; 3], |s| s.exponents.clone());
    SpectrumRow {
        segment: segment.to_string(),
        lambda1: e[0],
        lambda2: e[1],
        lambda3: e[2],
    }
}

/// Writes `curve.csv`, `capacity.csv`, a config echo, one trace per seed for
/// the longest interval and, if asked, `curve.svg`.
pub fn write_timing_report(report: &TimingReport, out: &Path, plots: bool) -> Result<Vec<PathBuf>> {
    if report.cells.is_empty() {
        return Err(OdrcError::Argument("timing report has no records".into()));
    }
    ensure_dir(out)?;
    let mut written = Vec::new();
    let curve = out.join("curve.csv");
    write_rows(&curve, &curve_rows(report))?;
    written.push(curve);
    let cap = out.join("capacity.csv");
    write_rows(
        &cap,
        &[CapacityRow {
            condition: report.condition.clone(),
            capacity_s: report.capacity,
            sd: report.capacity_sd,
        }],
    )?;
    written.push(cap);
    written.push(write_config_echo(&report.config, out)?);
    let longest = report
        .cells
        .iter()
        .map(|c| c.interval_s)
        .fold(f64::MIN, f64::max);
    for cell in report.cells.iter().filter(|c| c.interval_s == longest) {
        if let Some(rec) = cell.test.first() {
            let path = out.join(format!("seed_{}", cell.seed)).join("trace.csv");
            write_rows(&path, &trace_rows(rec))?;
            written.push(path);
        }
    }
    if plots {
        let path = out.join("curve.svg");
        let mean = report.mean_r2();
        let svg = line_plot(
            "R² vs interval",
            "interval (s)",
            "R²",
            &[("mean", &report.curve.abscissa, &mean)],
        );
        fs::write(&path, svg).map_err(|e| OdrcError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

pub fn write_noise_report(
    report: &NoiseSweepReport,
    out: &Path,
    plots: bool,
) -> Result<Vec<PathBuf>> {
    if report.rows.is_empty() {
        return Err(OdrcError::Argument("noise sweep has no records".into()));
    }
    ensure_dir(out)?;
    let mut written = Vec::new();
    let caps: Vec<CapacityRow> = report
        .reports
        .iter()
        .map(|r| CapacityRow {
            condition: format!("noise={}", r.config.noise),
            capacity_s: r.capacity,
            sd: r.capacity_sd,
        })
        .collect();
    let cap = out.join("capacity.csv");
    write_rows(&cap, &caps)?;
    written.push(cap);
    let sweep = out.join("noise_sweep.csv");
    write_rows(&sweep, &report.rows)?;
    written.push(sweep);
    let curves: Vec<CurveRow> = report
        .reports
        .iter()
        .flat_map(|r| {
            let label = format!("noise={}", r.config.noise);
            curve_rows(r).into_iter().map(move |row| CurveRow {
                condition: label.clone(),
                ..row
            })
        })
        .collect();
    let curve = out.join("curve.csv");
    write_rows(&curve, &curves)?;
    written.push(curve);
    if plots {
        let x: Vec<f64> = report.rows.iter().map(|r| r.noise.log10()).collect();
        let y: Vec<f64> = report.rows.iter().map(|r| r.normalized).collect();
        let path = out.join("noise_sweep.svg");
        let svg = line_plot(
            "normalized capacity",
            "log10 noise",
            "C / C(1e-3)",
            &[("capacity", &x, &y)],
        );
        fs::write(&path, svg).map_err(|e| OdrcError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

pub fn write_sweep_report(
    report: &ParameterSweepReport,
    out: &Path,
    plots: bool,
) -> Result<Vec<PathBuf>> {
    if report.rows.is_empty() {
        return Err(OdrcError::Argument("parameter sweep has no records".into()));
    }
    ensure_dir(out)?;
    let mut written = Vec::new();
    let caps: Vec<CapacityRow> = report
        .reports
        .iter()
        .map(|r| CapacityRow {
            condition: r.condition.clone(),
            capacity_s: r.capacity,
            sd: r.capacity_sd,
        })
        .collect();
    let cap = out.join("capacity.csv");
    write_rows(&cap, &caps)?;
    written.push(cap);
    let curves: Vec<CurveRow> = report.reports.iter().flat_map(curve_rows).collect();
    let curve = out.join("curve.csv");
    write_rows(&curve, &curves)?;
    written.push(curve);
    if plots {
        let x: Vec<f64> = (0..report.rows.len()).map(|i| i as f64).collect();
        let y: Vec<f64> = report.rows.iter().map(|r| r.capacity).collect();
        let path = out.join("sweep.svg");
        let svg = line_plot(
            "capacity per sweep value",
            "sweep index",
            "capacity (s)",
            &[("capacity", &x, &y)],
        );
        fs::write(&path, svg).map_err(|e| OdrcError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Writes per-seed `trace.csv`, `returnmap.csv` and `spectrum.csv` under
/// `seed_<k>/`, plus the target map and spectrum at the top level.
pub fn write_chaos_report(report: &ChaosReport, out: &Path, plots: bool) -> Result<Vec<PathBuf>> {
    if report.results.is_empty() {
        return Err(OdrcError::Argument("chaos report has no records".into()));
    }
    ensure_dir(out)?;
    let mut written = vec![write_config_echo(&report.config, out)?];
    let target_map = out.join("returnmap.csv");
    write_rows(&target_map, &return_map_rows("target", &report.target_map))?;
    written.push(target_map);
    let mut spectra = vec![spectrum_row("target", &report.target_spectrum)];
    if let Some(oracle) = &report.oracle_spectrum {
        spectra.push(spectrum_row("oracle", &Ok(oracle.clone())));
    }
    let spec = out.join("spectrum.csv");
    write_rows(&spec, &spectra)?;
    written.push(spec);
    let mut summary = Vec::new();
    for res in &report.results {
        let dir = out.join(format!("seed_{}", res.seed));
        let trace = dir.join("trace.csv");
        write_rows(&trace, &trace_rows(&res.test))?;
        let map = dir.join("returnmap.csv");
        let mut rows = return_map_rows("reproduction", &res.map_reproduction);
        rows.extend(return_map_rows("generalization", &res.map_generalization));
        write_rows(&map, &rows)?;
        let spec = dir.join("spectrum.csv");
        write_rows(
            &spec,
            &[
                spectrum_row("reproduction", &res.spectrum_reproduction),
                spectrum_row("generalization", &res.spectrum_generalization),
            ],
        )?;
        written.extend([trace, map, spec]);
        summary.push(CurveRow {
            task_s: report.config.train_ms as f64 / 1000.0,
            seed: res.seed,
            r2: res.r2_task.mean,
            condition: report.condition.clone(),
        });
        if plots {
            let path = dir.join("returnmap.svg");
            let svg = scatter_plot(
                "return map",
                "m_i",
                "m_i+1",
                &[
                    ("target", &report.target_map.pairs),
                    ("generalization", &res.map_generalization.pairs),
                ],
            );
            fs::write(&path, svg).map_err(|e| OdrcError::io(&path, e))?;
            written.push(path);
        }
    }
    let curve = out.join("curve.csv");
    write_rows(&curve, &summary)?;
    written.push(curve);
    Ok(written)
}

pub fn write_config_echo(config: &super::config::ExperimentConfig, out: &Path) -> Result<PathBuf> {
    ensure_dir(out)?;
    let path = out.join("config.toml");
    fs::write(&path, config.to_toml_string()).map_err(|e| OdrcError::io(&path, e))?;
    Ok(path)
}

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
const W: f64 = 640.0;
const H: f64 = 420.0;
const M: f64 = 50.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let mut f = Frame {
            x0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y0: f64::INFINITY,
            y1: f64::NEG_INFINITY,
        };
        for (x, y) in points.filter(|(x, y)| x.is_finite() && y.is_finite()) {
            f.x0 = f.x0.min(x);
            f.x1 = f.x1.max(x);
            f.y0 = f.y0.min(y);
            f.y1 = f.y1.max(y);
        }
        if !f.x0.is_finite() {
            return Frame {
                x0: 0.0,
                x1: 1.0,
                y0: 0.0,
                y1: 1.0,
            };
        }
        if f.x1 - f.x0 < 1e-12 {
            f.x1 = f.x0 + 1.0;
        }
        if f.y1 - f.y0 < 1e-12 {
            f.y1 = f.y0 + 1.0;
        }
        f
    }

    fn px(&self, x: f64) -> f64 {
        M + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * M)
    }

    fn py(&self, y: f64) -> f64 {
        H - M - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * M)
    }
}

fn svg_header(title: &str, xlabel: &str, ylabel: &str, f: &Frame) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="20" text-anchor="middle">{title}</text>
<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>
<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{ylabel}</text>
<rect x="{M}" y="{M}" width="{}" height="{}" fill="none" stroke="black"/>
<text x="{M}" y="{}" text-anchor="start">{:.3}</text><text x="{}" y="{}" text-anchor="end">{:.3}</text>
<text x="{}" y="{}" text-anchor="end">{:.3}</text><text x="{}" y="{}" text-anchor="end">{:.3}</text>
"#,
        W / 2.0,
        W / 2.0,
        H - 10.0,
        H / 2.0,
        H / 2.0,
        W - 2.0 * M,
        H - 2.0 * M,
        H - M + 15.0,
        f.x0,
        W - M,
        H - M + 15.0,
        f.x1,
        M - 4.0,
        H - M,
        f.y0,
        M - 4.0,
        M + 4.0,
        f.y1,
    );
    s
}

/// Polyline plot of one or more series.
pub fn line_plot(
    title: &str,
    xlabel: &str,
    ylabel: &str,
    series: &[(&str, &[f64], &[f64])],
) -> String {
    let f = Frame::fit(
        series
            .iter()
            .flat_map(|(_, x, y)| x.iter().copied().zip(y.iter().copied())),
    );
    let mut s = svg_header(title, xlabel, ylabel, &f);
    for (i, (name, x, y)) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = x
            .iter()
            .zip(y.iter())
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(&a, &b)| format!("{:.1},{:.1}", f.px(a), f.py(b)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{colour}" text-anchor="end">{name}</text>"#,
            W - M - 4.0,
            M + 14.0 * (i + 1) as f64
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Scatter plot of point clouds.
pub fn scatter_plot(
    title: &str,
    xlabel: &str,
    ylabel: &str,
    series: &[(&str, &[(f64, f64)])],
) -> String {
    let f = Frame::fit(series.iter().flat_map(|(_, p)| p.iter().copied()));
    let mut s = svg_header(title, xlabel, ylabel, &f);
    for (i, (name, pts)) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        for &(a, b) in pts.iter().filter(|(a, b)| a.is_finite() && b.is_finite()) {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.1}" cy="{:.1}" r="1.5" fill="{colour}"/>"#,
                f.px(a),
                f.py(b)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{colour}" text-anchor="end">{name}</text>"#,
            W - M - 4.0,
            M + 14.0 * (i + 1) as f64
        );
    }
    s.push_str("</svg>\n");
    s
}
