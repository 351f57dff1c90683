//! Minimal self-contained SVG charts.

use std::fmt::Write;

use lagdeconv::TimeSeries;

use crate::record::{PeakClass, StudyRecord};
use crate::stats::Histogram;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 50.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let widen = |(a, b): (f64, f64)| if b > a { (a, b) } else { (a - 0.5, a + 0.5) };
        let (x0, x1) = widen(x);
        let (y0, y1) = widen(y);
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }
}

fn open(title: &str, xlabel: &str, ylabel: &str, f: &Frame) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>"#, W / 2.0);
    let _ = writeln!(
        s,
        r#"<path d="M{PAD},{PAD} V{b} H{r}" fill="none" stroke="black"/>"#,
        b = H - PAD,
        r = W - PAD
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#, W / 2.0, H - 12.0);
    let _ = writeln!(s, r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{ylabel}</text>"#, H / 2.0, H / 2.0);
    for (v, x, y, anchor) in [
        (f.x0, PAD, H - PAD + 16.0, "start"),
        (f.x1, W - PAD, H - PAD + 16.0, "end"),
        (f.y0, PAD - 4.0, H - PAD, "end"),
        (f.y1, PAD - 4.0, PAD + 4.0, "end"),
    ] {
        let _ = writeln!(s, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{v:.3}</text>"#);
    }
    s
}

pub fn histogram(h: &Histogram) -> String {
    let density = h.density();
    let top = density.iter().cloned().fold(0.0, f64::max);
    let f = Frame::new((h.edges[0], *h.edges.last().unwrap()), (0.0, top));
    let mut s = open("Relative error density", "relative error", "density", &f);
    for (e, d) in h.edges.windows(2).zip(&density) {
        let (x, x2, y) = (f.px(e[0]), f.px(e[1]), f.py(*d));
        let _ = writeln!(
            s,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="steelblue" stroke="white"/>"#,
            x2 - x,
            f.py(0.0) - y
        );
    }
    s.push_str("</svg>\n");
    s
}

fn class_color(c: PeakClass) -> &'static str {
    match c {
        PeakClass::Early => "crimson",
        PeakClass::Late => "steelblue",
    }
}

pub fn bound_scatter(records: &[StudyRecord]) -> String {
    let top = records.iter().fold(0.0f64, |m, r| m.max(r.rel_error).max(r.lower_k1));
    let f = Frame::new((0.0, top), (0.0, top));
    let mut s = open("Relative error against lower bound", "lower bound (one term)", "relative error", &f);
    let _ = writeln!(
        s,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-dasharray="4 3"/>"#,
        f.px(0.0),
        f.py(0.0),
        f.px(top),
        f.py(top)
    );
    for r in records {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
            f.px(r.lower_k1),
            f.py(r.rel_error),
            class_color(r.peak_class)
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn reconstructions(records: &[StudyRecord], series: &[TimeSeries]) -> String {
    let t_max = series.first().map_or(1.0, |s| s.t_max());
    let (lo, hi) = series
        .iter()
        .flat_map(|s| s.values().iter())
        .fold((0.0f64, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    let f = Frame::new((0.0, t_max), (lo, hi));
    let mut s = open("Reconstructed boundary series", "time", "head", &f);
    for (r, ts) in records.iter().zip(series) {
        let mut d = String::new();
        for (i, (&t, &v)) in ts.times().iter().zip(ts.values()).enumerate() {
            let _ = write!(d, "{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, f.px(t), f.py(v));
        }
        let _ = writeln!(
            s,
            r#"<path d="{}" fill="none" stroke="{}" stroke-opacity="0.5"/>"#,
            d.trim_end(),
            class_color(r.peak_class)
        );
    }
    s.push_str("</svg>\n");
    s
}
