//! Minimal self-contained SVG line plots.

use std::fmt::Write as _;

use crate::verify::SweepResult;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn fmt_tick(x: f64, log: bool) -> String {
    if log {
        format!("1e{x:.1}")
    } else if x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e4) {
        format!("{x:.2e}")
    } else {
        format!("{x:.4}")
    }
}

/// Value against the sweep axis. Log-log sweeps drop nonpositive points.
pub fn line_plot(sweep: &SweepResult) -> String {
    let log = sweep.log_log;
    let pts: Vec<(f64, f64)> = sweep
        .points
        .iter()
        .filter(|p| p.axis.is_finite() && p.value.is_finite())
        .filter(|p| !log || (p.axis > 0.0 && p.value > 0.0))
        .map(|p| if log { (p.axis.log10(), p.value.log10()) } else { (p.axis, p.value) })
        .collect();

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    let mut title = sweep.sweep_id.clone();
    if let Some(s) = sweep.fitted_slope {
        write!(title, " (slope {s:.3})").unwrap();
    }
    writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(&title)
    )
    .unwrap();
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    writeln!(out, r#"<polyline points="{x0},{y1} {x0},{y0} {x1},{y0}" fill="none" stroke="black"/>"#).unwrap();
    let axis_label = if log { format!("log10 {}", sweep.axis.name()) } else { sweep.axis.name().to_string() };
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{axis_label}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0
    )
    .unwrap();

    if !pts.is_empty() {
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &pts {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
        if xmax == xmin {
            xmax = xmin + 1.0;
        }
        if ymax == ymin {
            ymax = ymin + 1.0;
        }
        let sx = |x: f64| x0 + (x - xmin) / (xmax - xmin) * (x1 - x0);
        let sy = |y: f64| y0 - (y - ymin) / (ymax - ymin) * (y0 - y1);
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#,
            coords.join(" ")
        )
        .unwrap();
        for &(x, y) in &pts {
            writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, sx(x), sy(y)).unwrap();
        }
        let text = r#"font-family="sans-serif" font-size="11""#;
        for (v, px) in [(xmin, x0), (xmax, x1)] {
            writeln!(out, r#"<text x="{px}" y="{}" text-anchor="middle" {text}>{}</text>"#, y0 + 16.0, fmt_tick(v, log))
                .unwrap();
        }
        for (v, py) in [(ymin, y0), (ymax, y1)] {
            writeln!(out, r#"<text x="{}" y="{}" text-anchor="end" {text}>{}</text>"#, x0 - 6.0, py + 4.0, fmt_tick(v, log))
                .unwrap();
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{Axis, SweepPoint};

    #[test]
    fn plot_contains_all_points() {
        let points = (1..=5)
            .map(|i| SweepPoint { axis: i as f64, value: (i * i) as f64, margin: None })
            .collect();
        let s = SweepResult::new("a<b", Axis::Time, points, true);
        let svg = line_plot(&s);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 5);
        assert!(svg.contains("a&lt;b"));
        assert!(svg.contains("slope 2.000"));
    }

    #[test]
    fn empty_sweep_still_renders() {
        let s = SweepResult::new("empty", Axis::Energy, vec![], false);
        assert!(line_plot(&s).contains("</svg>"));
    }
}
