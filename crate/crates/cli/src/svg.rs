//! Minimal self-contained SVG line plots in plane coordinates.

use std::fmt::Write;

use num_complex::Complex64;

use crate::args::Window;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

pub struct Curve {
    pub points: Vec<Complex64>,
    pub label: String,
    pub dashed: bool,
    pub color: Option<&'static str>,
}

pub struct Figure {
    pub window: Window,
    pub title: String,
    pub curves: Vec<Curve>,
}

pub fn palette(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Path data for the parts of `points` near the window; `y` is negated so
/// that the plane's upward axis points up on screen.
fn path_data(points: &[Complex64], w: &Window) -> String {
    let margin = Window {
        x_min: w.x_min - w.width(),
        x_max: w.x_max + w.width(),
        y_min: w.y_min - w.height(),
        y_max: w.y_max + w.height(),
    };
    let mut d = String::new();
    let mut pen_down = false;
    for z in points {
        if !z.is_finite() || !margin.contains(*z) {
            pen_down = false;
            continue;
        }
        let cmd = if pen_down { 'L' } else { 'M' };
        let _ = write!(d, "{cmd}{:.5} {:.5}", z.re, 0.0 - z.im);
        pen_down = true;
    }
    d
}

impl Figure {
    pub fn render(&self) -> String {
        let w = &self.window;
        let font = w.height().min(w.width()) / 32.0;
        let stroke = w.width().max(w.height()) / 500.0;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" data-format-version="1" viewBox="{} {} {} {}" width="800" height="{:.0}">"#,
            w.x_min,
            -w.y_max,
            w.width(),
            w.height(),
            800.0 * w.height() / w.width()
        );
        let _ = writeln!(s, "<title>{}</title>", escape(&self.title));
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="white"/>"#,
            w.x_min,
            -w.y_max,
            w.width(),
            w.height()
        );
        let axis = format!(r##"stroke="#bbbbbb" stroke-width="{}""##, 0.5 * stroke);
        let _ = writeln!(s, r#"<line x1="{}" y1="0" x2="{}" y2="0" {axis}/>"#, w.x_min, w.x_max);
        let _ = writeln!(s, r#"<line x1="0" y1="{}" x2="0" y2="{}" {axis}/>"#, -w.y_max, -w.y_min);
        for (i, c) in self.curves.iter().enumerate() {
            let color = c.color.unwrap_or_else(|| palette(i));
            let dash = if c.dashed {
                format!(r#" stroke-dasharray="{} {}""#, 6.0 * stroke, 4.0 * stroke)
            } else {
                String::new()
            };
            let d = path_data(&c.points, w);
            if d.is_empty() {
                continue;
            }
            let _ = writeln!(
                s,
                r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="{stroke}"{dash}><title>{}</title></path>"#,
                escape(&c.label)
            );
        }
        let mut row = 0;
        for (i, c) in self.curves.iter().enumerate() {
            if c.label.is_empty() {
                continue;
            }
            let color = c.color.unwrap_or_else(|| palette(i));
            let y = -w.y_max + font * (1.5 + 1.3 * row as f64);
            row += 1;
            let x = w.x_min + font;
            let dash = if c.dashed {
                format!(r#" stroke-dasharray="{} {}""#, 6.0 * stroke, 4.0 * stroke)
            } else {
                String::new()
            };
            let _ = writeln!(
                s,
                r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="{stroke}"{dash}/>"#,
                x + 2.0 * font
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="{font}">{}</text>"#,
                x + 2.5 * font,
                y + 0.35 * font,
                escape(&c.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}
