//! Standalone SVG 1.1 charts: line pairs, violins, and grouped bars.
//!
//! Every chart uses an 800x600 viewBox with the plot area inset by fixed
//! margins. Output depends only on the input data.

use std::fmt::Write as _;

use super::bars::BarChart;
use super::curves::{AnnotationKind, CurveSet};
use super::violin::ViolinSummary;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;

const LEFT: f64 = 90.0;
const RIGHT: f64 = 770.0;
const TOP: f64 = 60.0;
const BOTTOM: f64 = 500.0;

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub enum Chart<'a> {
    Curves(&'a CurveSet),
    Violin(&'a ViolinSummary),
    Bars(&'a BarChart),
}

pub fn emit_svg(chart: &Chart<'_>) -> String {
    match chart {
        Chart::Curves(c) => curves_svg(c),
        Chart::Violin(v) => violin_svg(v),
        Chart::Bars(b) => bars_svg(b),
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Coordinates at two decimals, with `-0.00` folded to `0.00`.
fn c(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy)]
struct Scale {
    lo: f64,
    hi: f64,
    from: f64,
    to: f64,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        self.from + (v - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }
}

/// Round-number ticks covering `[lo, hi]`; returns (ticks, step).
fn nice_ticks(lo: f64, hi: f64, target: usize) -> (Vec<f64>, f64) {
    let (lo, hi) = if (hi - lo).abs() < f64::EPSILON * lo.abs().max(1.0) {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    };
    let raw = (hi - lo) / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).floor() as i64;
    let last = (hi / step).ceil() as i64;
    ((first..=last).map(|i| i as f64 * step).collect(), step)
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 { 0 } else { (-step.log10()).ceil().max(0.0) as usize };
    let s = format!("{v:.decimals$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|ch| ch == '0' || ch == '.') => rest.to_string(),
        _ => s,
    }
}

struct Doc {
    body: String,
}

impl Doc {
    fn new(title: &str) -> Self {
        let mut body = String::new();
        body.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
        let _ = writeln!(
            body,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
            w = WIDTH,
            h = HEIGHT
        );
        let _ = writeln!(body, "<title>{}</title>", escape(title));
        body.push_str("<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n");
        let _ = writeln!(
            body,
            "<text x=\"400\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">{}</text>",
            escape(title)
        );
        Doc { body }
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, attrs: &str) {
        let _ = writeln!(
            self.body,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {attrs}/>",
            c(x1),
            c(y1),
            c(x2),
            c(y2)
        );
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, size: u32, content: &str, extra: &str) {
        let _ = writeln!(
            self.body,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" font-size=\"{size}\"{extra}>{}</text>",
            c(x),
            c(y),
            escape(content)
        );
    }

    fn y_axis(&mut self, scale: &Scale, ticks: &[f64], step: f64, label: &str) {
        self.body.push_str("<g class=\"axis y-axis\">\n");
        self.line(LEFT, TOP, LEFT, BOTTOM, "stroke=\"#000000\"");
        for &t in ticks {
            let y = scale.map(t);
            self.line(LEFT - 5.0, y, LEFT, y, "stroke=\"#000000\"");
            self.line(LEFT, y, RIGHT, y, "stroke=\"#dddddd\" stroke-width=\"0.5\"");
            self.text(LEFT - 8.0, y + 4.0, "end", 12, &tick_label(t, step), "");
        }
        let mid = (TOP + BOTTOM) / 2.0;
        self.text(
            25.0,
            mid,
            "middle",
            14,
            label,
            &format!(" transform=\"rotate(-90 25 {})\"", c(mid)),
        );
        self.body.push_str("</g>\n");
    }

    fn x_axis_numeric(&mut self, scale: &Scale, ticks: &[f64], step: f64, label: &str) {
        self.body.push_str("<g class=\"axis x-axis\">\n");
        self.line(LEFT, BOTTOM, RIGHT, BOTTOM, "stroke=\"#000000\"");
        for &t in ticks {
            let x = scale.map(t);
            self.line(x, BOTTOM, x, BOTTOM + 5.0, "stroke=\"#000000\"");
            self.text(x, BOTTOM + 20.0, "middle", 12, &tick_label(t, step), "");
        }
        self.text((LEFT + RIGHT) / 2.0, BOTTOM + 50.0, "middle", 14, label, "");
        self.body.push_str("</g>\n");
    }

    fn x_axis_categories(&mut self, centres: &[(f64, &str)], label: &str, rotate: bool) {
        self.body.push_str("<g class=\"axis x-axis\">\n");
        self.line(LEFT, BOTTOM, RIGHT, BOTTOM, "stroke=\"#000000\"");
        for &(x, name) in centres {
            self.line(x, BOTTOM, x, BOTTOM + 5.0, "stroke=\"#000000\"");
            if rotate {
                let y = BOTTOM + 14.0;
                self.text(x, y, "end", 10, name, &format!(" transform=\"rotate(-60 {} {})\"", c(x), c(y)));
            } else {
                self.text(x, BOTTOM + 20.0, "middle", 12, name, "");
            }
        }
        self.text((LEFT + RIGHT) / 2.0, HEIGHT - 15.0, "middle", 14, label, "");
        self.body.push_str("</g>\n");
    }

    fn legend(&mut self, entries: &[(String, &str, bool)]) {
        self.body.push_str("<g class=\"legend\">\n");
        let x = RIGHT - 170.0;
        let _ = writeln!(
            self.body,
            "<rect x=\"{}\" y=\"{}\" width=\"160\" height=\"{}\" fill=\"#ffffff\" fill-opacity=\"0.85\" stroke=\"#999999\"/>",
            c(x),
            c(TOP + 8.0),
            c(10.0 + 20.0 * entries.len() as f64)
        );
        for (i, (name, colour, is_line)) in entries.iter().enumerate() {
            let y = TOP + 25.0 + 20.0 * i as f64;
            if *is_line {
                self.line(x + 10.0, y - 4.0, x + 35.0, y - 4.0, &format!("stroke=\"{colour}\" stroke-width=\"2\""));
            } else {
                let _ = writeln!(
                    self.body,
                    "<rect x=\"{}\" y=\"{}\" width=\"25\" height=\"10\" fill=\"{colour}\"/>",
                    c(x + 10.0),
                    c(y - 9.0)
                );
            }
            self.text(x + 42.0, y, "start", 12, name, "");
        }
        self.body.push_str("</g>\n");
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn curves_svg(set: &CurveSet) -> String {
    let mut doc = Doc::new(&set.title);
    let points = set.curves.iter().flat_map(|cv| cv.points.iter());
    let (mut x_hi, mut y_lo, mut y_hi) = (0.0f64, 0.0f64, 0.0f64);
    for &(x, y) in points {
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    for a in &set.annotations {
        y_lo = y_lo.min(a.value);
        y_hi = y_hi.max(a.value);
    }
    if x_hi <= 0.0 {
        x_hi = 1.0;
    }
    let (xt, xs) = nice_ticks(0.0, x_hi, 8);
    let (yt, ys) = nice_ticks(y_lo, y_hi, 8);
    let sx = Scale { lo: xt[0], hi: *xt.last().unwrap(), from: LEFT, to: RIGHT };
    let sy = Scale { lo: yt[0], hi: *yt.last().unwrap(), from: BOTTOM, to: TOP };
    doc.y_axis(&sy, &yt, ys, "JIF");
    doc.x_axis_numeric(&sx, &xt, xs, "PUB (publications per year)");
    if sy.lo < 0.0 && sy.hi > 0.0 {
        let y0 = sy.map(0.0);
        doc.line(LEFT, y0, RIGHT, y0, "class=\"zero-line\" stroke=\"#555555\" stroke-dasharray=\"4 3\"");
    }
    for (i, curve) in set.curves.iter().enumerate() {
        let pts: Vec<String> = curve
            .points
            .iter()
            .map(|&(x, y)| format!("{},{}", c(sx.map(x)), c(sy.map(y))))
            .collect();
        let _ = writeln!(
            doc.body,
            "<polyline class=\"curve\" data-label=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>",
            escape(&curve.label),
            PALETTE[i % PALETTE.len()],
            pts.join(" ")
        );
    }
    for a in &set.annotations {
        let (id, colour) = match a.kind {
            AnnotationKind::MeanPoint => ("mean-point", "#000000"),
            AnnotationKind::MrZeroCrossing => ("mr-zero-crossing", PALETTE[1]),
            AnnotationKind::DemandOptimum => ("demand-optimum", PALETTE[0]),
        };
        let (x, y) = (sx.map(a.pub_value), sy.map(a.value));
        let _ = writeln!(
            doc.body,
            "<circle id=\"{id}\" class=\"annotation\" cx=\"{}\" cy=\"{}\" r=\"5\" fill=\"{colour}\"/>",
            c(x),
            c(y)
        );
        let label = format!("{} ({:.1}, {:.3})", a.label, a.pub_value, a.value);
        doc.text(x + 8.0, y - 8.0, "start", 11, &label, "");
    }
    let entries: Vec<(String, &str, bool)> = set
        .curves
        .iter()
        .enumerate()
        .map(|(i, cv)| (cv.label.clone(), PALETTE[i % PALETTE.len()], true))
        .collect();
    doc.legend(&entries);
    doc.finish()
}

fn violin_svg(summary: &ViolinSummary) -> String {
    let mut doc = Doc::new("Averaged elasticity by region");
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in &summary.regions {
        if let (Some(first), Some(last)) = (r.density.grid.first(), r.density.grid.last()) {
            lo = lo.min(*first);
            hi = hi.max(*last);
        }
    }
    if !lo.is_finite() {
        lo = -1.0;
        hi = 1.0;
    }
    let (yt, ys) = nice_ticks(lo, hi, 8);
    let sy = Scale { lo: yt[0], hi: *yt.last().unwrap(), from: BOTTOM, to: TOP };
    doc.y_axis(&sy, &yt, ys, "averaged elasticity e");
    let slots = summary.regions.len().max(1) as f64;
    let slot = (RIGHT - LEFT) / slots;
    let mut centres = Vec::new();
    for (i, r) in summary.regions.iter().enumerate() {
        let cx = LEFT + slot * (i as f64 + 0.5);
        centres.push((cx, r.region.as_str()));
        let half = slot * 0.35;
        let peak = r.density.peak();
        let scale = if peak > 0.0 { half / peak } else { 0.0 };
        let right: Vec<String> = r
            .density
            .grid
            .iter()
            .zip(&r.density.density)
            .map(|(&g, &d)| format!("{},{}", c(cx + d * scale), c(sy.map(g))))
            .collect();
        let left: Vec<String> = r
            .density
            .grid
            .iter()
            .zip(&r.density.density)
            .rev()
            .map(|(&g, &d)| format!("{},{}", c(cx - d * scale), c(sy.map(g))))
            .collect();
        let _ = writeln!(
            doc.body,
            "<polygon class=\"violin\" data-region=\"{}\" fill=\"{}\" fill-opacity=\"0.35\" stroke=\"{}\" points=\"{} {}\"/>",
            r.region,
            PALETTE[i % PALETTE.len()],
            PALETTE[i % PALETTE.len()],
            right.join(" "),
            left.join(" ")
        );
        let s = &r.stats;
        let bw = slot * 0.06;
        let whisker_lo = s.lower_fence.max(s.min);
        let whisker_hi = s.upper_fence.min(s.max);
        doc.line(cx, sy.map(whisker_lo), cx, sy.map(s.q1), "class=\"whisker\" stroke=\"#000000\"");
        doc.line(cx, sy.map(s.q3), cx, sy.map(whisker_hi), "class=\"whisker\" stroke=\"#000000\"");
        doc.line(cx - bw / 2.0, sy.map(whisker_lo), cx + bw / 2.0, sy.map(whisker_lo), "stroke=\"#000000\"");
        doc.line(cx - bw / 2.0, sy.map(whisker_hi), cx + bw / 2.0, sy.map(whisker_hi), "stroke=\"#000000\"");
        let _ = writeln!(
            doc.body,
            "<rect class=\"iqr-box\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#ffffff\" stroke=\"#000000\"/>",
            c(cx - bw),
            c(sy.map(s.q3)),
            c(2.0 * bw),
            c(sy.map(s.q1) - sy.map(s.q3))
        );
        doc.line(cx - bw, sy.map(s.median), cx + bw, sy.map(s.median), "class=\"median\" stroke=\"#d62728\" stroke-width=\"2\"");
        for (v, tag) in [(r.e_max, "max"), (r.e_min, "min")] {
            let _ = writeln!(
                doc.body,
                "<circle class=\"extreme\" cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#000000\"/>",
                c(cx),
                c(sy.map(v))
            );
            doc.text(cx + 8.0, sy.map(v) + 4.0, "start", 11, &format!("e_{tag} = {v:.3}"), "");
        }
    }
    doc.x_axis_categories(&centres, "region", false);
    doc.legend(&[
        ("kernel density".to_string(), PALETTE[0], false),
        ("IQR box".to_string(), "#cccccc", false),
        ("median".to_string(), PALETTE[1], true),
    ]);
    doc.finish()
}

fn bars_svg(chart: &BarChart) -> String {
    let mut doc = Doc::new(&chart.title);
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for g in &chart.groups {
        for &v in &g.values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if hi <= lo {
        hi = lo + 1.0;
    }
    let (yt, ys) = nice_ticks(lo, hi, 8);
    let sy = Scale { lo: yt[0], hi: *yt.last().unwrap(), from: BOTTOM, to: TOP };
    doc.y_axis(&sy, &yt, ys, &chart.y_label);
    let n = chart.groups.len();
    let slot = (RIGHT - LEFT) / n.max(1) as f64;
    let series = chart.series.len().max(1) as f64;
    let bar = slot * 0.8 / series;
    let base = sy.map(0.0);
    let mut centres = Vec::with_capacity(n);
    for (i, g) in chart.groups.iter().enumerate() {
        let x0 = LEFT + slot * i as f64 + slot * 0.1;
        centres.push((LEFT + slot * (i as f64 + 0.5), g.label.as_str()));
        for (k, &v) in g.values.iter().enumerate() {
            let y = sy.map(v);
            let _ = writeln!(
                doc.body,
                "<rect class=\"bar\" data-group=\"{}\" data-series=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
                escape(&g.label),
                escape(chart.series.get(k).map_or("", String::as_str)),
                c(x0 + bar * k as f64),
                c(y.min(base)),
                c(bar),
                c((base - y).abs()),
                PALETTE[k % PALETTE.len()]
            );
        }
    }
    if let Some(div) = &chart.divider {
        let x = LEFT + slot * div.after as f64;
        doc.line(x, TOP, x, BOTTOM, "class=\"divider\" stroke=\"#555555\" stroke-dasharray=\"6 4\"");
        doc.text(x + 4.0, TOP + 14.0, "start", 12, &div.label, "");
    }
    doc.x_axis_categories(&centres, "journals sorted by averaged elasticity", true);
    let entries: Vec<(String, &str, bool)> = chart
        .series
        .iter()
        .enumerate()
        .map(|(k, s)| (s.clone(), PALETTE[k % PALETTE.len()], false))
        .collect();
    doc.legend(&entries);
    doc.finish()
}
