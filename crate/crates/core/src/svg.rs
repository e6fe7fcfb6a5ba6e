//! Static SVG overlay of a normalized walk and the limit curve.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::dfs::DfsTrace;
use crate::error::Result;
use crate::numeric::LimitCurve;

const PLOT_WIDTH: f64 = 1000.0;
const PLOT_HEIGHT: f64 = 500.0;
const MARGIN: f64 = 50.0;
const T_MAX: f64 = 2.0;
const H_MAX: f64 = 1.0;
const CURVE_SAMPLES: usize = 2000;

fn px(t: f64) -> f64 {
    MARGIN + t / T_MAX * PLOT_WIDTH
}

fn py(h: f64) -> f64 {
    MARGIN + (1.0 - h / H_MAX) * PLOT_HEIGHT
}

/// `(t, X/N)` with one point per pixel column, keeping the column maximum.
pub fn decimate_profile(trace: &DfsTrace, n_vertices: usize) -> Vec<(f64, f64)> {
    let nf = n_vertices as f64;
    let columns = PLOT_WIDTH as usize;
    let mut best: Vec<Option<(f64, f64)>> = vec![None; columns + 1];
    for (n, &x) in trace.heights().iter().enumerate() {
        let t = n as f64 / nf;
        let col = ((t / T_MAX * columns as f64) as usize).min(columns);
        let h = x as f64 / nf;
        if best[col].is_none_or(|(_, b)| h > b) {
            best[col] = Some((t, h));
        }
    }
    best.into_iter().flatten().collect()
}

fn polyline(points: &[(f64, f64)], colour: &str) -> String {
    let mut out = format!(r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points=""#);
    for (i, &(t, h)) in points.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{:.2},{:.2}", px(t.min(T_MAX)), py(h.clamp(-0.05, H_MAX)));
    }
    out.push_str("\"/>\n");
    out
}

/// Profile in blue, limit curve in red, on axes `[0, 2] x [0, 1]`.
pub fn render_svg(trace: &DfsTrace, curve: Option<&LimitCurve>, n_vertices: usize) -> String {
    let width = PLOT_WIDTH + 2.0 * MARGIN;
    let height = PLOT_HEIGHT + 2.0 * MARGIN;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let (x0, y0) = (px(0.0), py(0.0));
    let _ = writeln!(
        svg,
        r#"<g stroke="black" stroke-width="1"><line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{}"/></g>"#,
        px(T_MAX),
        py(H_MAX)
    );
    let _ = writeln!(svg, r#"<g font-family="sans-serif" font-size="12" fill="black">"#);
    for i in 0..=4 {
        let t = i as f64 * 0.5;
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{t}</text>"#, px(t), y0 + 18.0);
    }
    for i in 0..=4 {
        let h = i as f64 * 0.25;
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{h}</text>"#, x0 - 6.0, py(h) + 4.0);
    }
    let _ = writeln!(svg, "</g>");

    if let Some(curve) = curve {
        svg.push_str(&polyline(&curve.sample(CURVE_SAMPLES), "red"));
    }
    if trace.len() > 2 {
        svg.push_str(&polyline(&decimate_profile(trace, n_vertices), "blue"));
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn emit_svg(
    trace: &DfsTrace,
    curve: Option<&LimitCurve>,
    n_vertices: usize,
    path: impl AsRef<Path>,
) -> Result<()> {
    fs::write(path, render_svg(trace, curve, n_vertices))?;
    Ok(())
}
