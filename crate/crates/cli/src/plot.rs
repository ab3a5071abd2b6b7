//! SVG box plots of an evaluation report: one panel for RMS roughness
//! (ground truth plus every candidate) and one for MSE against ground truth.

use std::fmt::Write;

use tactile_core::eval::{EvalReport, GROUNDTRUTH_LABEL};

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 300.0;
const MARGIN: f64 = 50.0;

/// Tukey box: quartiles by linear interpolation, whiskers at 1.5 IQR.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxStats {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    pub outliers: Vec<f64>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos.fract());
    match sorted.get(i + 1) {
        Some(next) => sorted[i] + frac * (next - sorted[i]),
        None => sorted[i],
    }
}

pub fn box_stats(values: &[f64]) -> Option<BoxStats> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let (q1, median, q3) = (quantile(&v, 0.25), quantile(&v, 0.5), quantile(&v, 0.75));
    let (lo, hi) = (q1 - 1.5 * (q3 - q1), q3 + 1.5 * (q3 - q1));
    let inside: Vec<f64> = v.iter().copied().filter(|x| (lo..=hi).contains(x)).collect();
    Some(BoxStats {
        q1,
        median,
        q3,
        whisker_lo: inside.first().copied().unwrap_or(q1),
        whisker_hi: inside.last().copied().unwrap_or(q3),
        outliers: v.into_iter().filter(|x| !(lo..=hi).contains(x)).collect(),
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn panel(out: &mut String, x0: f64, title: &str, series: &[(String, Vec<f64>)]) {
    let all: Vec<f64> = series.iter().flat_map(|(_, v)| v.iter().copied()).collect();
    let (mut lo, mut hi) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo, hi) = (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let top = MARGIN;
    let y = |v: f64| top + PANEL_H * (hi - v) / (hi - lo);
    let _ = writeln!(out, r#"<g font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">{}</text>"#, x0 + PANEL_W / 2.0, top - 20.0, escape(title));
    let _ = writeln!(out, r##"<rect x="{x0:.1}" y="{top:.1}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="#888"/>"##);
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.3}</text>"#, x0 - 4.0, y(v) + 4.0);
    }
    let slot = PANEL_W / series.len().max(1) as f64;
    for (i, (label, values)) in series.iter().enumerate() {
        let cx = x0 + slot * (i as f64 + 0.5);
        let half = (slot * 0.3).min(30.0);
        let _ = writeln!(out, r#"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{} (n={})</text>"#, top + PANEL_H + 16.0, escape(label), values.len());
        let Some(b) = box_stats(values) else { continue };
        let _ = writeln!(out, r#"<line x1="{cx:.1}" x2="{cx:.1}" y1="{:.1}" y2="{:.1}" stroke="black"/>"#, y(b.whisker_hi), y(b.q3));
        let _ = writeln!(out, r#"<line x1="{cx:.1}" x2="{cx:.1}" y1="{:.1}" y2="{:.1}" stroke="black"/>"#, y(b.q1), y(b.whisker_lo));
        let _ = writeln!(
            out,
            r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="#9ecae1" stroke="black"/>"##,
            cx - half, y(b.q3), 2.0 * half, (y(b.q1) - y(b.q3)).max(0.5)
        );
        let _ = writeln!(out, r#"<line x1="{:.1}" x2="{:.1}" y1="{:.1}" y2="{:.1}" stroke="black" stroke-width="2"/>"#, cx - half, cx + half, y(b.median), y(b.median));
        for v in &b.outliers {
            let _ = writeln!(out, r#"<circle cx="{cx:.1}" cy="{:.1}" r="2.5" fill="none" stroke="black"/>"#, y(*v));
        }
    }
    let _ = writeln!(out, "</g>");
}

pub fn box_plots(report: &EvalReport) -> String {
    let mut rms: Vec<(String, Vec<f64>)> = Vec::new();
    if let Some(gt) = report.conditions.iter().max_by_key(|c| c.entries.len()) {
        rms.push((GROUNDTRUTH_LABEL.to_string(), gt.rms_groundtruth().values));
    }
    for c in &report.conditions {
        rms.push((c.label.clone(), c.rms_candidate().values));
    }
    let mse: Vec<(String, Vec<f64>)> = report.conditions.iter().map(|c| (c.label.clone(), c.mse().values)).collect();

    let width = 2.0 * PANEL_W + 3.0 * MARGIN;
    let height = PANEL_H + 2.0 * MARGIN;
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let path = match report.measurement {
        tactile_core::eval::MeasurementPath::ExtractedFromMesh => "extracted from mesh",
        tactile_core::eval::MeasurementPath::Direct => "direct",
    };
    panel(&mut out, MARGIN, &format!("RMS roughness ({path})"), &rms);
    panel(&mut out, 2.0 * MARGIN + PANEL_W, "MSE vs ground truth", &mse);
    out.push_str("</svg>\n");
    out
}
