//! Minimal line plots as standalone SVG documents.
//!
//! Output depends only on the data: fixed 800×600 view box, fixed number
//! formatting, no timestamps.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const TICKS: usize = 5;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Each segment is drawn as one polyline.
    pub segments: Vec<Vec<(f64, f64)>>,
    /// Drawn as red circles.
    pub markers: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, Debug)]
struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn covering(values: impl Iterator<Item = f64>) -> Self {
        let (lo, hi) = values
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(v), b.max(v))
            });
        if !lo.is_finite() {
            return Range { lo: -1.0, hi: 1.0 };
        }
        let span = hi - lo;
        if span <= 1e-12 * (1.0 + lo.abs()) {
            return Range {
                lo: lo - 1.0,
                hi: hi + 1.0,
            };
        }
        let pad = 0.05 * span;
        Range {
            lo: lo - pad,
            hi: hi + pad,
        }
    }

    fn fraction(&self, v: f64) -> f64 {
        (v - self.lo) / (self.hi - self.lo)
    }

    fn tick(&self, i: usize) -> f64 {
        self.lo + (self.hi - self.lo) * i as f64 / (TICKS - 1) as f64
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

impl Plot {
    pub fn render(&self) -> String {
        let all = || self.segments.iter().flatten().chain(&self.markers).copied();
        let xr = Range::covering(all().map(|p| p.0));
        let yr = Range::covering(all().map(|p| p.1));
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + plot_w * xr.fraction(x);
        let sy = |y: f64| TOP + plot_h * (1.0 - yr.fraction(y));

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="600" viewBox="0 0 800 600">"#
        );
        let _ = writeln!(
            out,
            r#"<rect x="0" y="0" width="800" height="600" fill="white"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="400" y="30" text-anchor="middle" font-family="sans-serif" font-size="18">{}</text>"#,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>"#
        );
        for i in 0..TICKS {
            let (xv, yv) = (xr.tick(i), yr.tick(i));
            let (px, py) = (sx(xv), sy(yv));
            let _ = writeln!(
                out,
                r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
                TOP + plot_h,
                TOP + plot_h + 6.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
                TOP + plot_h + 22.0,
                tick_label(xv)
            );
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT:.2}" y2="{py:.2}" stroke="black"/>"#,
                LEFT - 6.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="12">{}</text>"#,
                LEFT - 10.0,
                py + 4.0,
                tick_label(yv)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
            LEFT + plot_w / 2.0,
            HEIGHT - 20.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="20" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="14" transform="rotate(-90 20 {:.2})">{}</text>"#,
            TOP + plot_h / 2.0,
            TOP + plot_h / 2.0,
            escape(&self.y_label)
        );
        for segment in &self.segments {
            let points: Vec<String> = segment
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="navy" stroke-width="2" points="{}"/>"#,
                points.join(" ")
            );
        }
        for &(x, y) in &self.markers {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="6" fill="none" stroke="red" stroke-width="2"/>"#,
                sx(x),
                sy(y)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}
