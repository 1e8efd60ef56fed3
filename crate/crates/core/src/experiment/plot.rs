//! Static SVG renderings of a report: accuracy curves and the Q statistic.

use std::fmt::Write as _;

use crate::experiment::report::{ExperimentReport, SeriesRow};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLOR_A: &str = "#1f77b4";
const COLOR_B: &str = "#ff7f0e";

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(1.0);
        MARGIN + (v - self.x_min) / span * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN)
    }

    fn point(&self, x: f64, y: f64) -> String {
        format!("{:.2},{:.2}", self.x(x), self.y(y))
    }
}

fn open(svg: &mut String, title: &str, frame: &Frame) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="25" font-family="sans-serif" font-size="14" text-anchor="middle">{title}</text>"#,
        WIDTH / 2.0
    );
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        svg,
        r#"<path d="M{left},{top} L{left},{bottom} L{right},{bottom}" fill="none" stroke="black"/>"#
    );
    for (value, anchor, x) in [(frame.x_min, "start", left), (frame.x_max, "end", right)] {
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{value}</text>"#,
            bottom + 16.0
        );
    }
    for value in [frame.y_min, frame.y_max] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{value:.3}</text>"#,
            left - 4.0,
            frame.y(value) + 4.0
        );
    }
}

fn polyline(svg: &mut String, points: &[String], color: &str) {
    if points.is_empty() {
        return;
    }
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
        points.join(" ")
    );
}

fn legend(svg: &mut String, entries: &[(&str, &str)]) {
    for (i, (label, color)) in entries.iter().enumerate() {
        let y = MARGIN + 14.0 + 16.0 * i as f64;
        let x = WIDTH - MARGIN - 150.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}" font-family="sans-serif" font-size="11">{label}</text>"#,
            x + 20.0,
            x + 25.0,
            y + 4.0
        );
    }
}

fn x_range(rows: &[&SeriesRow]) -> (f64, f64) {
    let first = rows.first().map_or(0.0, |r| r.index as f64);
    let last = rows.last().map_or(1.0, |r| r.index as f64);
    (first, last)
}

/// Prequential accuracy of A (and B) against the instance index.
pub fn accuracy_svg(report: &ExperimentReport, stride: u64) -> String {
    let rows: Vec<&SeriesRow> = report.sampled(stride).collect();
    let (x_min, x_max) = x_range(&rows);
    let frame = Frame {
        x_min,
        x_max,
        y_min: 0.0,
        y_max: 1.0,
    };
    let mut svg = String::new();
    open(&mut svg, "Prequential accuracy", &frame);
    let a: Vec<String> = rows.iter().map(|r| frame.point(r.index as f64, r.acc_a)).collect();
    polyline(&mut svg, &a, COLOR_A);
    let mut entries = vec![("A: learned metric", COLOR_A)];
    if report.paired {
        let b: Vec<String> = rows
            .iter()
            .filter_map(|r| r.acc_b.map(|v| frame.point(r.index as f64, v)))
            .collect();
        polyline(&mut svg, &b, COLOR_B);
        entries.push(("B: identity metric", COLOR_B));
    }
    legend(&mut svg, &entries);
    svg.push_str("</svg>\n");
    svg
}

/// Q statistic with a zero line; `None` for single-classifier reports.
/// Undefined steps break the curve into separate polylines.
pub fn qstat_svg(report: &ExperimentReport, stride: u64) -> Option<String> {
    if !report.paired {
        return None;
    }
    let rows: Vec<&SeriesRow> = report.sampled(stride).collect();
    let (x_min, x_max) = x_range(&rows);
    let bound = rows.iter().filter_map(|r| r.q).fold(0.0f64, |m, q| m.max(q.abs()));
    let bound = if bound > 0.0 { bound } else { 1.0 };
    let frame = Frame {
        x_min,
        x_max,
        y_min: -bound,
        y_max: bound,
    };
    let mut svg = String::new();
    open(&mut svg, "Q statistic (negative favors A)", &frame);
    let _ = writeln!(
        svg,
        r##"<line x1="{MARGIN}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#888888" stroke-dasharray="4 3"/>"##,
        WIDTH - MARGIN,
        y = frame.y(0.0)
    );
    let mut segment = Vec::new();
    for r in &rows {
        match r.q {
            Some(q) => segment.push(frame.point(r.index as f64, q)),
            None => {
                polyline(&mut svg, &segment, COLOR_A);
                segment.clear();
            }
        }
    }
    polyline(&mut svg, &segment, COLOR_A);
    svg.push_str("</svg>\n");
    Some(svg)
}
