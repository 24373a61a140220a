//! File writers: scalar CSV, state JSONL, JSON documents and the SVG plot.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use fhn_cnn::{ScalarSeries, Trajectory};
use serde::Serialize;

use crate::error::CliError;

pub const SCALARS_HEADER: &str = "t,norm_sq,lyapunov_v,sync_error,boundary_gap_sq,threshold_fired";

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn finish(path: &Path, mut w: BufWriter<File>) -> Result<(), CliError> {
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    write_text(path, &text)
}

pub fn scalars_csv(series: &ScalarSeries) -> String {
    let mut out = String::with_capacity(series.len() * 120);
    out.push_str(SCALARS_HEADER);
    out.push('\n');
    for (t, r) in series.times.iter().zip(&series.records) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(*t),
            fmt_f64(r.norm_sq),
            fmt_f64(r.lyapunov_v),
            fmt_f64(r.sync_error),
            fmt_f64(r.boundary_gap_sq),
            r.threshold_fired
        );
    }
    out
}

#[derive(Serialize)]
struct StateLine<'a> {
    t: f64,
    x: &'a [f64],
    y: &'a [f64],
}

/// One JSON object per sample, fields row-major.
pub fn write_states_jsonl(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    let mut w = create(path)?;
    for (t, s) in traj.times().iter().zip(&traj.states) {
        let line = StateLine { t: *t, x: s.x.as_slice(), y: s.y.as_slice() };
        serde_json::to_writer(&mut w, &line).map_err(|e| CliError::io(path, std::io::Error::other(e)))?;
        w.write_all(b"\n").map_err(|e| CliError::io(path, e))?;
    }
    finish(path, w)
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const MAX_POINTS: usize = 2000;

/// Log-scale plot of `E(t)`. Zero samples break the curve.
pub fn sync_error_svg(times: &[f64], values: &[f64]) -> String {
    let positive: Vec<f64> = values.iter().copied().filter(|v| *v > 0.0 && v.is_finite()).collect();
    let (t0, t1) = match (times.first(), times.last()) {
        (Some(a), Some(b)) if b > a => (*a, *b),
        (Some(a), _) => (*a, *a + 1.0),
        _ => (0.0, 1.0),
    };
    let (lo, hi) = if positive.is_empty() {
        (-1.0, 0.0)
    } else {
        let min = positive.iter().copied().fold(f64::INFINITY, f64::min);
        let max = positive.iter().copied().fold(0.0, f64::max);
        let lo = min.log10().floor();
        let hi = max.log10().ceil();
        (lo, if hi > lo { hi } else { lo + 1.0 })
    };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |t: f64| LEFT + (t - t0) / (t1 - t0) * plot_w;
    let py = |v: f64| TOP + (hi - v.log10()) / (hi - lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    let decades = (hi - lo) as usize;
    let stride = decades.div_ceil(10).max(1);
    for d in (0..=decades).step_by(stride) {
        let e = lo + d as f64;
        let y = TOP + (hi - e) / (hi - lo) * plot_h;
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0
        );
    }
    for j in 0..=5 {
        let t = t0 + (t1 - t0) * j as f64 / 5.0;
        let x = px(t);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h + 16.0,
            trim_number(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">sync error E</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    if positive.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">E = 0 at every sample</text>"#,
            LEFT + plot_w / 2.0,
            TOP + plot_h / 2.0
        );
    } else {
        let step = times.len().div_ceil(MAX_POINTS).max(1);
        let mut segment: Vec<String> = Vec::new();
        let flush = |segment: &mut Vec<String>, svg: &mut String| {
            if segment.len() > 1 {
                let _ = writeln!(
                    svg,
                    r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
                    segment.join(" ")
                );
            }
            segment.clear();
        };
        for (j, (t, v)) in times.iter().zip(values).enumerate() {
            if j % step != 0 && j + 1 != times.len() {
                continue;
            }
            if *v > 0.0 && v.is_finite() {
                segment.push(format!("{:.2},{:.2}", px(*t), py(*v)));
            } else {
                flush(&mut segment, &mut svg);
            }
        }
        flush(&mut segment, &mut svg);
    }
    svg.push_str("</svg>\n");
    svg
}

fn trim_number(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}
