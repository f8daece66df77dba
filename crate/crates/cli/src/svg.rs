//! Minimal SVG 1.1 scatter plot of quality against one cost indicator.

use std::fmt::Write;

use crate::format::sig6;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 64.0;
const TICKS: usize = 5;

pub struct Point<'a> {
    pub name: &'a str,
    pub cost: f64,
    pub quality: f64,
    pub on_frontier: bool,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi > lo {
        let pad = (hi - lo) * 0.05;
        let floor = if lo >= 0.0 { (lo - pad).max(0.0) } else { lo - pad };
        (floor, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.5 };
        (lo - pad, hi + pad)
    }
}

/// `frontier` lists indices into `points` in increasing cost order.
pub fn scatter(points: &[Point], frontier: &[usize], x_label: &str, y_label: &str) -> String {
    let (x0, x1) = range(points.iter().map(|p| p.cost));
    let (y0, y1) = range(points.iter().map(|p| p.quality));
    let sx = |v: f64| MARGIN + (v - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |v: f64| HEIGHT - MARGIN - (v - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    out.push_str("<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\"><line x1=\"{left}\" y1=\"{bottom}\" x2=\"{right}\" y2=\"{bottom}\"/><line x1=\"{left}\" y1=\"{bottom}\" x2=\"{left}\" y2=\"{top}\"/></g>"
    );
    out.push_str("<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"10\">\n");
    for i in 0..TICKS {
        let t = i as f64 / (TICKS - 1) as f64;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            sx(xv),
            bottom + 16.0,
            sig6(xv)
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            left - 6.0,
            sy(yv) + 3.0,
            sig6(yv)
        );
    }
    out.push_str("</g>\n");
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        HEIGHT - 20.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">{}</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );

    if !frontier.is_empty() {
        let coords: Vec<String> = frontier
            .iter()
            .map(|&i| format!("{:.2},{:.2}", sx(points[i].cost), sy(points[i].quality)))
            .collect();
        let _ = writeln!(
            out,
            "<polyline class=\"frontier\" points=\"{}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>",
            coords.join(" ")
        );
    }
    out.push_str("<g class=\"records\">\n");
    for p in points {
        let (fill, class) = if p.on_frontier {
            ("#d62728", "record frontier-member")
        } else {
            ("#1f77b4", "record")
        };
        let _ = writeln!(
            out,
            "<circle class=\"{class}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{fill}\"><title>{}</title></circle>",
            sx(p.cost),
            sy(p.quality),
            escape(p.name)
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}
