//! Minimal SVG 1.1 writer. Output depends only on the spec and canvas size.

use std::fmt::Write;

use super::bars::{BarChartSpec, ChartKind, LineStyle, ReferenceLine};
use super::boxplot::BoxPlotSpec;
use super::violin::ViolinSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub enum ChartSpec<'a> {
    Violin(&'a ViolinSpec),
    BoxPlot(&'a BoxPlotSpec),
    Bars(&'a BarChartSpec),
}

const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 72.0;
const PALETTE: [&str; 6] = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#b07aa1"];

/// Rough advance width of `s` at the default 11px font.
fn text_width(s: &str) -> f64 {
    s.chars().count() as f64 * 6.2
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Canvas {
    out: String,
    width: f64,
    height: f64,
    y_min: f64,
    y_max: f64,
}

impl Canvas {
    fn new(width: u32, height: u32, title: &str, y_min: f64, y_max: f64) -> Result<Canvas> {
        let (w, h) = (width as f64, height as f64);
        if w <= MARGIN_LEFT + MARGIN_RIGHT || h <= MARGIN_TOP + MARGIN_BOTTOM {
            return Err(Error::Viz(format!("canvas {width}x{height} is too small")));
        }
        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(out, r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            w / 2.0,
            esc(title)
        );
        Ok(Canvas { out, width: w, height: h, y_min, y_max })
    }

    fn left(&self) -> f64 {
        MARGIN_LEFT
    }
    fn right(&self) -> f64 {
        self.width - MARGIN_RIGHT
    }
    fn top(&self) -> f64 {
        MARGIN_TOP
    }
    fn bottom(&self) -> f64 {
        self.height - MARGIN_BOTTOM
    }

    fn y(&self, v: f64) -> f64 {
        let t = (v - self.y_min) / (self.y_max - self.y_min);
        self.bottom() - t.clamp(0.0, 1.0) * (self.bottom() - self.top())
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, extra: &str) {
        let _ = writeln!(
            self.out,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}"{extra}/>"#
        );
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, s: &str) {
        let _ = writeln!(self.out, r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}">{}</text>"#, esc(s));
    }

    fn axes(&mut self, y_label: &str) {
        let (l, r, t, b) = (self.left(), self.right(), self.top(), self.bottom());
        self.line(l, t, l, b, "black", "");
        self.line(l, b, r, b, "black", "");
        let step = (self.y_max - self.y_min) / 5.0;
        for i in 0..=5 {
            let v = self.y_min + step * i as f64;
            let y = self.y(v);
            self.line(l - 4.0, y, l, y, "black", "");
            self.text(l - 6.0, y + 4.0, "end", &super::boxplot::trim_num(v));
        }
        let mid = (t + b) / 2.0;
        let _ = writeln!(
            self.out,
            r#"<text x="16" y="{mid:.2}" text-anchor="middle" transform="rotate(-90 16 {mid:.2})">{}</text>"#,
            esc(y_label)
        );
    }

    fn reference(&mut self, rl: &ReferenceLine) {
        let y = self.y(rl.value);
        let dash = match rl.style {
            LineStyle::Solid => "",
            LineStyle::Dashed => r#" stroke-dasharray="6 4""#,
        };
        let (l, r) = (self.left(), self.right());
        self.line(l, y, r, y, "#333333", dash);
    }

    /// Label at the right end of a reference line, on a white backing so it
    /// stays legible over chart marks.
    fn reference_label(&mut self, rl: &ReferenceLine) {
        let (y, r) = (self.y(rl.value), self.right());
        let w = text_width(&rl.label) + 4.0;
        let _ = writeln!(
            self.out,
            r#"<rect x="{:.2}" y="{:.2}" width="{w:.2}" height="13" fill="white" fill-opacity="0.85"/>"#,
            r - w,
            y - 14.0
        );
        self.text(r - 2.0, y - 3.0, "end", &rl.label);
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

pub fn render_svg(spec: ChartSpec<'_>, width: u32, height: u32) -> Result<String> {
    match spec {
        ChartSpec::Violin(v) => render_violin(v, width, height),
        ChartSpec::BoxPlot(b) => render_box(b, width, height),
        ChartSpec::Bars(b) => render_bars(b, width, height),
    }
}

fn render_bars(spec: &BarChartSpec, width: u32, height: u32) -> Result<String> {
    let mut c = Canvas::new(width, height, &spec.title, 0.0, spec.y_max.max(f64::MIN_POSITIVE))?;
    c.axes(&spec.y_label);
    let ng = spec.groups.len().max(1) as f64;
    let nc = spec.categories.len().max(1) as f64;
    let panel = (c.right() - c.left()) / ng;
    let slot = panel * 0.8 / nc;
    for (gi, g) in spec.groups.iter().enumerate() {
        let x0 = c.left() + panel * gi as f64 + panel * 0.1;
        for (ci, cat) in spec.categories.iter().enumerate() {
            let xc = x0 + slot * (ci as f64 + 0.5);
            let color = PALETTE[ci % PALETTE.len()];
            let Some(bar) = spec.bars.iter().find(|b| &b.group == g && &b.category == cat) else { continue };
            let y = c.y(bar.value);
            match spec.kind {
                ChartKind::Bars => {
                    let _ = writeln!(
                        c.out,
                        r#"<rect x="{:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
                        xc - slot * 0.4,
                        slot * 0.8,
                        c.bottom() - y
                    );
                }
                ChartKind::Points => {
                    let _ = writeln!(c.out, r#"<circle cx="{xc:.2}" cy="{y:.2}" r="4" fill="{color}"/>"#);
                }
            }
            if let Some(e) = spec.error_bars.iter().find(|e| &e.group == g && &e.category == cat) {
                let (lo, hi) = (c.y(e.lower), c.y(e.upper));
                c.line(xc, lo, xc, hi, "black", "");
                c.line(xc - 4.0, lo, xc + 4.0, lo, "black", "");
                c.line(xc - 4.0, hi, xc + 4.0, hi, "black", "");
            }
            if let Some(a) = spec.annotations.iter().find(|a| &a.group == g && &a.category == cat) {
                c.text(xc, y - 4.0, "middle", &a.text);
            }
            if text_width(&bar.label) <= slot {
                let b = c.bottom();
                c.text(xc, b + 12.0, "middle", &bar.label);
            }
        }
        let b = c.bottom();
        c.text(x0 + panel * 0.4, b + 30.0, "middle", g);
    }
    if nc > 1.0 {
        // legend
        for (ci, cat) in spec.categories.iter().enumerate() {
            let x = c.left() + ci as f64 * 110.0;
            let y = c.height - 18.0;
            let _ = writeln!(
                c.out,
                r#"<rect x="{x:.2}" y="{:.2}" width="10" height="10" fill="{}"/>"#,
                y - 9.0,
                PALETTE[ci % PALETTE.len()]
            );
            c.text(x + 14.0, y, "start", cat);
        }
    }
    for rl in &spec.reference_lines {
        c.reference(rl);
        c.reference_label(rl);
    }
    Ok(c.finish())
}

fn render_violin(spec: &ViolinSpec, width: u32, height: u32) -> Result<String> {
    let mut c = Canvas::new(width, height, "Percentile distributions", spec.y_range[0], spec.y_range[1])?;
    c.axes("Percentile");
    let n = spec.violin.len().max(1) as f64;
    let panel = (c.right() - c.left()) / n;
    let peak = spec.violin.iter().flat_map(|g| g.density.iter().map(|p| p[1])).fold(0.0, f64::max);
    for (i, g) in spec.violin.iter().enumerate() {
        let xc = c.left() + panel * (i as f64 + 0.5);
        let half = panel * 0.4;
        let color = PALETTE[i % PALETTE.len()];
        if !g.density.is_empty() && peak > 0.0 {
            let mut d = String::new();
            for (k, p) in g.density.iter().enumerate() {
                let _ = write!(d, "{}{:.2},{:.2} ", if k == 0 { "M" } else { "L" }, xc + half * p[1] / peak, c.y(p[0]));
            }
            for p in g.density.iter().rev() {
                let _ = write!(d, "L{:.2},{:.2} ", xc - half * p[1] / peak, c.y(p[0]));
            }
            d.push('Z');
            let _ = writeln!(c.out, r#"<path d="{d}" fill="{color}" fill-opacity="0.35" stroke="{color}"/>"#);
        }
        let (lo, hi) = (c.y(g.lower_adjacent), c.y(g.upper_adjacent));
        c.line(xc, lo, xc, hi, "black", "");
        let (q1, q3) = (c.y(g.q1), c.y(g.q3));
        let _ = writeln!(
            c.out,
            r##"<rect x="{:.2}" y="{q3:.2}" width="8" height="{:.2}" fill="#444444"/>"##,
            xc - 4.0,
            q1 - q3
        );
        let _ = writeln!(c.out, r#"<circle cx="{xc:.2}" cy="{:.2}" r="3" fill="white"/>"#, c.y(g.median));
        if let Some(pm) = g.point_mass {
            let _ = writeln!(c.out, r#"<circle cx="{xc:.2}" cy="{:.2}" r="5" fill="{color}"/>"#, c.y(pm));
        }
        let b = c.bottom();
        c.text(xc, b + 16.0, "middle", &g.group);
    }
    Ok(c.finish())
}

fn render_box(spec: &BoxPlotSpec, width: u32, height: u32) -> Result<String> {
    let mut c = Canvas::new(width, height, "Percentiles by publication year", 0.0, 100.0)?;
    c.axes("Percentile");
    let groups: Vec<&str> = spec.group_labels.iter().map(|g| g.group.as_str()).collect();
    let ng = groups.len().max(1) as f64;
    let ny = spec.years.len().max(1) as f64;
    let panel = (c.right() - c.left()) / ng;
    let slot = panel * 0.9 / ny;
    for rl in &spec.reference_lines {
        c.reference(rl);
    }
    for (gi, label) in spec.group_labels.iter().enumerate() {
        let x0 = c.left() + panel * gi as f64 + panel * 0.05;
        let color = PALETTE[gi % PALETTE.len()];
        for (yi, year) in spec.years.iter().enumerate() {
            let Some(b) = spec.boxplot.iter().find(|b| b.group == label.group && b.year == *year) else { continue };
            let xc = x0 + slot * (yi as f64 + 0.5);
            let w = slot * 0.6;
            let (lo, hi) = (c.y(b.lower_whisker), c.y(b.upper_whisker));
            let (q1, q3) = (c.y(b.q1), c.y(b.q3));
            c.line(xc, lo, xc, q1, "black", "");
            c.line(xc, q3, xc, hi, "black", "");
            let _ = writeln!(
                c.out,
                r#"<rect x="{:.2}" y="{q3:.2}" width="{w:.2}" height="{:.2}" fill="{color}" fill-opacity="0.5" stroke="black"/>"#,
                xc - w / 2.0,
                q1 - q3
            );
            let m = c.y(b.median);
            c.line(xc - 3.0, m - 3.0, xc + 3.0, m + 3.0, "black", "");
            c.line(xc - 3.0, m + 3.0, xc + 3.0, m - 3.0, "black", "");
            let bottom = c.bottom();
            c.text(xc, bottom + 12.0, "middle", &year.to_string());
        }
        let (xm, bottom) = (x0 + panel * 0.45, c.bottom());
        let head = format!("{} (med={})", label.group, super::boxplot::trim_num(label.median_all_years));
        c.text(xm, bottom + 30.0, "middle", &head);
        if !label.differs_from.is_empty() {
            c.text(xm, bottom + 43.0, "middle", "differs from");
            c.text(xm, bottom + 56.0, "middle", &label.differs_from.join(", "));
        }
    }
    for rl in &spec.reference_lines {
        c.reference_label(rl);
    }
    Ok(c.finish())
}
