//! Minimal SVG 1.1 line charts: one or more panels side by side, each with
//! axes, ticks, a legend and one polyline per series.

use std::fmt::Write as _;

const PANEL_W: f64 = 520.0;
const PANEL_H: f64 = 380.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const HEADER_H: f64 = 30.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

struct Scale {
    lo: f64,
    hi: f64,
    log: bool,
    step: f64,
}

/// Smallest of 1, 2, 5 times a power of ten that is at least `raw`.
fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * mag).find(|&s| s >= raw * (1.0 - 1e-12)).unwrap_or(10.0 * mag)
}

impl Scale {
    fn fit(values: impl Iterator<Item = f64> + Clone, allow_log: bool) -> Scale {
        let finite = values.filter(|v| v.is_finite());
        let log = allow_log && finite.clone().all(|v| v > 0.0) && finite.clone().next().is_some();
        let mapped: Vec<f64> = finite.map(|v| if log { v.log10() } else { v }).collect();
        let (mut lo, mut hi) = mapped
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if log {
            lo = lo.floor();
            hi = hi.ceil();
        }
        if hi - lo < 1e-12 {
            hi = lo + 1.0;
        }
        let mut step = 1.0;
        if !log {
            step = nice_step((hi - lo) / 5.0);
            lo = (lo / step).floor() * step;
            hi = (hi / step).ceil() * step;
        }
        Scale { lo, hi, log, step }
    }

    fn unit(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let mut decades: Vec<f64> = ((self.lo as i64)..=(self.hi as i64)).map(|e| 10f64.powi(e as i32)).collect();
            while decades.len() > 8 {
                decades = decades.into_iter().step_by(2).collect();
            }
            decades
        } else {
            let n = ((self.hi - self.lo) / self.step).round() as i64;
            (0..=n).map(|k| self.lo + self.step * k as f64).collect()
        }
    }
}

/// Render `panels` left to right under a common title.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, panels: &[Panel]) -> String {
    let n = panels.len().max(1) as f64;
    let width = PANEL_W * n;
    let height = PANEL_H + HEADER_H;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="15">{}</text>"#, width / 2.0, escape(title));

    for (k, panel) in panels.iter().enumerate() {
        let ox = PANEL_W * k as f64;
        let oy = HEADER_H;
        let (x0, x1) = (ox + MARGIN_L, ox + PANEL_W - MARGIN_R);
        let (y0, y1) = (oy + PANEL_H - MARGIN_B, oy + MARGIN_T);
        let all = panel.series.iter().flat_map(|s| s.points.iter());
        let xs = Scale::fit(all.clone().map(|p| p.0), false);
        let ys = Scale::fit(all.map(|p| p.1), true);
        let px = |v: f64| x0 + xs.unit(v) * (x1 - x0);
        let py = |v: f64| y0 - ys.unit(v) * (y0 - y1);

        let _ = writeln!(out, r#"<g class="panel">"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#,
            (x0 + x1) / 2.0,
            oy + 22.0,
            escape(&panel.title)
        );
        let _ = writeln!(out, r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y0 - y1);
        for t in xs.ticks() {
            let x = px(t);
            let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{}" stroke="black"/>"#, y0 + 5.0);
            let _ = writeln!(out, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, y0 + 18.0, fmt_tick(t));
        }
        for t in ys.ticks() {
            let y = py(t);
            let _ = writeln!(out, r#"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0);
            let _ = writeln!(out, r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#dddddd"/>"##);
            let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 8.0, y + 4.0, fmt_tick(t));
        }
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, y0 + 38.0, escape(x_label));
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" transform="rotate(-90 {} {})">{}</text>"#,
            ox + 16.0,
            (y0 + y1) / 2.0,
            ox + 16.0,
            (y0 + y1) / 2.0,
            escape(&format!("{y_label}{}", if ys.log { " (log)" } else { "" }))
        );

        for (i, s) in panel.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite() && (!ys.log || *y > 0.0))
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
            let ly = y1 + 14.0 + 16.0 * i as f64;
            let _ = writeln!(out, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, x1 - 130.0, x1 - 110.0);
            let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, x1 - 105.0, ly + 4.0, escape(&s.label));
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}
